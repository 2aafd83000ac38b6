//! Single-chain rules: block structure, challenge derivation, block and
//! chain weight, heaviest-branch fork choice and block verification.

mod genesis;
mod verify;
mod view;
mod weight;

pub use genesis::{genesis_blocks, genesis_keys};
pub use verify::{challenge_seed, derive_challenge, verify_block, verify_block_with_space};
pub(crate) use verify::{check_chain_proof, check_header};
pub use view::{fork_choice, ChainView, ViewError};
pub use weight::{block_log_weight, chain_weight, log_weight_from_digest, proof_digest, CompensatedSum};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hash::{put_bytes, put_f64, put_u64, Canonical, Digest, FieldHasher};
use crate::keys::{KeyPair, PublicKey, Signature};
use crate::multichain::ResourceCommitment;
use crate::poc::OpeningProof;

/// A block `(pk, rec, H(prev), τ, τ′, weight, com)` signed by `pk`.
///
/// `chain` is the 1-based chain slot `k` and `log_weight` the declared
/// weight in the log domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub chain: u32,
    pub height: u64,
    pub miner: PublicKey,
    #[serde(with = "hex_records")]
    pub records: Vec<Vec<u8>>,
    pub prev_hash: Digest,
    pub proof: OpeningProof,
    pub shared_proof: Option<OpeningProof>,
    pub log_weight: f64,
    pub commitment: ResourceCommitment,
    pub signature: Signature,
}

impl Block {
    pub fn weight(&self) -> f64 {
        self.log_weight.exp()
    }

    /// Canonical encoding of every field except the signature.
    pub fn body_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        put_bytes(&mut out, b"block");
        put_u64(&mut out, self.chain as u64);
        put_u64(&mut out, self.height);
        self.miner.write_canonical(&mut out);
        put_u64(&mut out, self.records.len() as u64);
        for r in &self.records {
            put_bytes(&mut out, r);
        }
        self.prev_hash.write_canonical(&mut out);
        self.proof.write_canonical(&mut out);
        match &self.shared_proof {
            Some(p) => {
                put_u64(&mut out, 1);
                p.write_canonical(&mut out);
            }
            None => put_u64(&mut out, 0),
        }
        put_f64(&mut out, self.log_weight);
        self.commitment.write_canonical(&mut out);
        out
    }

    pub fn seal(&mut self, keys: &KeyPair) {
        self.signature = keys.sign(&self.body_bytes());
    }

    /// `H("block", body, signature)`; the next block's `prev_hash`.
    pub fn hash(&self) -> Digest {
        FieldHasher::new("block")
            .bytes(&self.body_bytes())
            .digest(&self.signature.0)
            .finish()
    }
}

/// Machine-readable verification failure.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    #[error("wrong-chain")]
    WrongChain,
    #[error("unknown-parent")]
    UnknownParent,
    #[error("height-mismatch")]
    HeightMismatch,
    #[error("weight-mismatch")]
    WeightMismatch,
    #[error("bad-records")]
    BadRecords,
    #[error("bad-signature")]
    BadSignature,
    #[error("bad-pk-binding")]
    BadPkBinding,
    #[error("genesis-window")]
    GenesisWindow,
    #[error("challenge-mismatch")]
    ChallengeMismatch,
    #[error("bad-chain-proof")]
    BadChainProof,
    #[error("bad-shared-proof")]
    BadSharedProof,
    #[error("gamma-reuse")]
    GammaReuse,
    #[error("commitment-conflict")]
    CommitmentConflict,
}

mod hex_records {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(records: &[Vec<u8>], s: S) -> Result<S::Ok, S::Error> {
        records.iter().map(hex::encode).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<u8>>, D::Error> {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|h| hex::decode(h).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests;
