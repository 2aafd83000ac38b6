use serde::{Deserialize, Serialize};

use crate::hash::FieldHasher;

/// Pseudo-random DAG over `{0, …, size-1}` with edges pointing from lower to
/// higher indices. Node `i` has `min(degree, i)` distinct parents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PebblingGraph {
    pub size: u64,
    pub degree: u32,
    pub nonce: Vec<u8>,
}

impl PebblingGraph {
    pub fn new(size: u64, degree: u32, nonce: impl Into<Vec<u8>>) -> Self {
        PebblingGraph {
            size,
            degree,
            nonce: nonce.into(),
        }
    }

    pub fn parents(&self, i: u64) -> Vec<u64> {
        build_parents(&self.nonce, self.degree, i)
    }
}

/// Parent set of node `i`: `min(degree, i)` distinct indices below `i`,
/// sorted ascending.
///
/// Candidates come from `H("parent", nonce, i, counter)` read as a 64-bit
/// little-endian integer and reduced into `[0, i)` without modulo bias;
/// repeats are skipped. When `degree >= i` every lower index is a parent.
pub fn build_parents(nonce: &[u8], degree: u32, i: u64) -> Vec<u64> {
    let want = (degree as u64).min(i) as usize;
    if want as u64 == i {
        return (0..i).collect();
    }
    let zone = u64::MAX - (u64::MAX % i);
    let mut out: Vec<u64> = Vec::with_capacity(want);
    let mut counter = 0u64;
    while out.len() < want {
        let d = FieldHasher::new("parent")
            .bytes(nonce)
            .u64(i)
            .u64(counter)
            .finish();
        counter += 1;
        let x = u64::from_le_bytes(d.0[..8].try_into().expect("8 bytes"));
        if x >= zone {
            continue;
        }
        let p = x % i;
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out.sort_unstable();
    out
}
