//! Pebbling-graph proof of space: `init` labels a DAG and commits to the
//! labels with a Merkle root, `open` answers a challenge with labels, parent
//! labels and inclusion paths, and `verify` checks paths and the labeling
//! recurrence at every challenged node.

mod fixture;
mod graph;
mod merkle;
mod partial;

pub use fixture::{read_fixture, write_fixture, FixtureError};
pub use graph::{build_parents, PebblingGraph};
pub use merkle::{leaf_hash, node_hash, root_from_path, MerkleTree};
pub use partial::PartialProver;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hash::{put_bytes, put_u64, Canonical, Digest, FieldHasher, DIGEST_LEN};

/// Largest accepted graph size. Labels plus tree for this size take 24 GiB.
pub const MAX_SIZE: u64 = 1 << 28;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PocError {
    #[error("graph size must be a nonzero power of two, got {0}")]
    BadSize(u64),
    #[error("graph size {0} exceeds the maximum {MAX_SIZE}")]
    SizeTooLarge(u64),
    #[error("graph degree must be at least 1")]
    BadDegree,
    #[error("challenge index {index} out of range for size {size}")]
    ChallengeOutOfRange { index: u64, size: u64 },
}

/// Why a proof was rejected.
#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PocReject {
    #[error("proof answers {got} indices, challenge has {expected}")]
    CountMismatch { expected: usize, got: usize },
    #[error("proof entry {position} opens index {got}, challenge asks {expected}")]
    IndexMismatch {
        position: usize,
        expected: u64,
        got: u64,
    },
    #[error("commitment parameters are invalid")]
    BadCommitment,
    #[error("inclusion path for node {0} does not authenticate")]
    BadPath(u64),
    #[error("node {index} carries {got} parents, graph has {expected}")]
    ParentCount {
        index: u64,
        expected: usize,
        got: usize,
    },
    #[error("inclusion path for parent {parent} of node {index} does not authenticate")]
    BadParentPath { index: u64, parent: u64 },
    #[error("label of node {0} does not follow from its parents")]
    BadLabel(u64),
}

/// Public commitment `γ` to a labeled graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceCommitment {
    pub gamma: Digest,
    pub size: u64,
    pub degree: u32,
    #[serde(with = "hex_bytes")]
    pub nonce: Vec<u8>,
}

impl SpaceCommitment {
    pub fn graph(&self) -> PebblingGraph {
        PebblingGraph::new(self.size, self.degree, self.nonce.clone())
    }
}

/// The prover's secret state: every label plus the full Merkle tree.
/// Immutable after `init`.
#[derive(Clone, Debug)]
pub struct SecretState {
    graph: PebblingGraph,
    labels: Vec<Digest>,
    tree: MerkleTree,
}

impl SecretState {
    pub fn graph(&self) -> &PebblingGraph {
        &self.graph
    }

    pub fn labels(&self) -> &[Digest] {
        &self.labels
    }

    pub fn label(&self, index: u64) -> Digest {
        self.labels[index as usize]
    }

    pub fn path(&self, index: u64) -> Vec<Digest> {
        self.tree.path(index as usize)
    }

    pub fn root(&self) -> Digest {
        self.tree.root()
    }

    pub fn tree(&self) -> &MerkleTree {
        &self.tree
    }

    /// Bytes held: `S·λ/8` for labels plus `(2S−1)·λ/8` for the tree.
    pub fn storage_bytes(&self) -> usize {
        (self.labels.len() + self.tree.node_count()) * DIGEST_LEN
    }

    /// Rebuilds the state from stored labels without checking them.
    pub(crate) fn from_labels(graph: PebblingGraph, labels: Vec<Digest>) -> Self {
        let tree = MerkleTree::build(&labels);
        SecretState {
            graph,
            labels,
            tree,
        }
    }

    /// Index of the first label that does not follow the labeling recurrence.
    pub fn first_bad_label(&self) -> Option<u64> {
        (0..self.graph.size).find(|&i| {
            let parents = self.graph.parents(i);
            let expected = label_of(&self.graph.nonce, i, parents.iter().map(|&p| &self.labels[p as usize]));
            expected != self.labels[i as usize]
        })
    }

    pub fn commitment(&self) -> SpaceCommitment {
        SpaceCommitment {
            gamma: self.tree.root(),
            size: self.graph.size,
            degree: self.graph.degree,
            nonce: self.graph.nonce.clone(),
        }
    }
}

/// Challenged node indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Challenge {
    pub indices: Vec<u64>,
}

impl Challenge {
    pub fn new(indices: Vec<u64>) -> Self {
        Challenge { indices }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParentOpening {
    pub label: Digest,
    pub path: Vec<Digest>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeOpening {
    pub index: u64,
    pub label: Digest,
    pub path: Vec<Digest>,
    pub parents: Vec<ParentOpening>,
}

/// Answer `τ` to a challenge: one opening per challenged index, in
/// challenge order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpeningProof {
    pub openings: Vec<NodeOpening>,
}

impl OpeningProof {
    pub fn indices(&self) -> Vec<u64> {
        self.openings.iter().map(|o| o.index).collect()
    }

    pub fn serialized_len(&self) -> usize {
        self.canonical_bytes().len()
    }
}

impl Canonical for ParentOpening {
    fn write_canonical(&self, out: &mut Vec<u8>) {
        self.label.write_canonical(out);
        self.path.write_canonical(out);
    }
}

impl Canonical for NodeOpening {
    fn write_canonical(&self, out: &mut Vec<u8>) {
        put_u64(out, self.index);
        self.label.write_canonical(out);
        self.path.write_canonical(out);
        self.parents.write_canonical(out);
    }
}

impl Canonical for OpeningProof {
    fn write_canonical(&self, out: &mut Vec<u8>) {
        put_bytes(out, b"poc-proof");
        self.openings.write_canonical(out);
    }
}

/// `H("label", nc, i, parent labels…)`.
pub fn label_of<'a>(nonce: &[u8], index: u64, parents: impl IntoIterator<Item = &'a Digest>) -> Digest {
    parents
        .into_iter()
        .fold(FieldHasher::new("label").bytes(nonce).u64(index), |h, p| h.digest(p))
        .finish()
}

fn check_params(size: u64, degree: u32) -> Result<(), PocError> {
    if size == 0 || !size.is_power_of_two() {
        return Err(PocError::BadSize(size));
    }
    if size > MAX_SIZE {
        return Err(PocError::SizeTooLarge(size));
    }
    if degree == 0 {
        return Err(PocError::BadDegree);
    }
    Ok(())
}

/// Labels a fresh graph of `size` nodes and commits to it.
pub fn init(size: u64, nonce: &[u8], degree: u32) -> Result<(SpaceCommitment, SecretState), PocError> {
    check_params(size, degree)?;
    let graph = PebblingGraph::new(size, degree, nonce.to_vec());
    // parent sampling is independent per node, labeling is sequential
    let parent_sets: Vec<Vec<u64>> = (0..size).into_par_iter().map(|i| graph.parents(i)).collect();
    let mut labels: Vec<Digest> = Vec::with_capacity(size as usize);
    for (i, parents) in parent_sets.iter().enumerate() {
        let l = label_of(nonce, i as u64, parents.iter().map(|&p| &labels[p as usize]));
        labels.push(l);
    }
    let state = SecretState::from_labels(graph, labels);
    Ok((state.commitment(), state))
}

/// Opens every challenged node.
pub fn open(state: &SecretState, challenge: &Challenge) -> Result<OpeningProof, PocError> {
    let size = state.graph.size;
    let openings = challenge
        .indices
        .iter()
        .map(|&index| {
            if index >= size {
                return Err(PocError::ChallengeOutOfRange { index, size });
            }
            let parents = state
                .graph
                .parents(index)
                .into_iter()
                .map(|p| ParentOpening {
                    label: state.label(p),
                    path: state.path(p),
                })
                .collect();
            Ok(NodeOpening {
                index,
                label: state.label(index),
                path: state.path(index),
                parents,
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(OpeningProof { openings })
}

/// Accepts iff every opening authenticates against `γ` and every challenged
/// label recomputes from its parents. Uses `O(q·d·log S)` hash calls.
pub fn verify(commitment: &SpaceCommitment, challenge: &Challenge, proof: &OpeningProof) -> Result<(), PocReject> {
    if check_params(commitment.size, commitment.degree).is_err() {
        return Err(PocReject::BadCommitment);
    }
    if proof.openings.len() != challenge.indices.len() {
        return Err(PocReject::CountMismatch {
            expected: challenge.indices.len(),
            got: proof.openings.len(),
        });
    }
    let size = commitment.size;
    for (position, (opening, &expected)) in proof.openings.iter().zip(&challenge.indices).enumerate() {
        if opening.index != expected {
            return Err(PocReject::IndexMismatch {
                position,
                expected,
                got: opening.index,
            });
        }
        let i = opening.index;
        if root_from_path(&opening.label, i, &opening.path, size) != Some(commitment.gamma) {
            return Err(PocReject::BadPath(i));
        }
        let parents = build_parents(&commitment.nonce, commitment.degree, i);
        if parents.len() != opening.parents.len() {
            return Err(PocReject::ParentCount {
                index: i,
                expected: parents.len(),
                got: opening.parents.len(),
            });
        }
        for (&p, po) in parents.iter().zip(&opening.parents) {
            if root_from_path(&po.label, p, &po.path, size) != Some(commitment.gamma) {
                return Err(PocReject::BadParentPath { index: i, parent: p });
            }
        }
        if label_of(&commitment.nonce, i, opening.parents.iter().map(|p| &p.label)) != opening.label {
            return Err(PocReject::BadLabel(i));
        }
    }
    Ok(())
}

/// Challenge for the initialization audit, derived from the commitment
/// itself: index `j` is `H("audit", γ, j) mod S`.
pub fn audit_challenge(commitment: &SpaceCommitment, q: usize) -> Challenge {
    let size = commitment.size.max(1);
    Challenge::new(
        (0..q as u64)
            .map(|j| {
                FieldHasher::new("audit")
                    .digest(&commitment.gamma)
                    .u64(j)
                    .finish()
                    .mod_u64(size)
            })
            .collect(),
    )
}

/// Challenge of `count` indices below `size` expanded from a seed digest:
/// a single index is `seed mod S`, more are `H("expand", seed, j) mod S`.
pub fn expand_challenge(seed: &Digest, size: u64, count: usize) -> Challenge {
    let size = size.max(1);
    if count == 1 {
        return Challenge::new(vec![seed.mod_u64(size)]);
    }
    Challenge::new(
        (0..count as u64)
            .map(|j| FieldHasher::new("expand").digest(seed).u64(j).finish().mod_u64(size))
            .collect(),
    )
}

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        hex::decode(s).map_err(serde::de::Error::custom)
    }
}
