//! A prover that keeps only part of its labels.

use rand::seq::index::sample;
use rand::{Rng, RngCore};

use super::{open, Challenge, OpeningProof, PocError, SecretState};
use crate::hash::Digest;

/// Holds the full Merkle tree but only a subset of the labels. Challenged
/// labels it lacks are guessed at random instead of recomputed.
pub struct PartialProver<'a> {
    state: &'a SecretState,
    kept: Vec<bool>,
}

impl<'a> PartialProver<'a> {
    /// Keeps `round(fraction·S)` labels chosen uniformly.
    pub fn new<R: Rng>(state: &'a SecretState, fraction: f64, rng: &mut R) -> Self {
        let size = state.graph().size as usize;
        let keep = ((fraction.clamp(0.0, 1.0) * size as f64).round() as usize).min(size);
        let mut kept = vec![false; size];
        for i in sample(rng, size, keep) {
            kept[i] = true;
        }
        PartialProver { state, kept }
    }

    pub fn stored(&self) -> usize {
        self.kept.iter().filter(|k| **k).count()
    }

    pub fn has(&self, index: u64) -> bool {
        self.kept[index as usize]
    }

    fn guess(&self, index: u64, real: Digest, rng: &mut impl RngCore) -> Digest {
        if self.has(index) {
            return real;
        }
        let mut d = [0u8; 32];
        rng.fill_bytes(&mut d);
        Digest(d)
    }

    pub fn respond<R: RngCore>(&self, challenge: &Challenge, rng: &mut R) -> Result<OpeningProof, PocError> {
        let mut proof = open(self.state, challenge)?;
        let graph = self.state.graph();
        for o in &mut proof.openings {
            o.label = self.guess(o.index, o.label, rng);
            for (p, idx) in o.parents.iter_mut().zip(graph.parents(o.index)) {
                p.label = self.guess(idx, p.label, rng);
            }
        }
        Ok(proof)
    }
}
