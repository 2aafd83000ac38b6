use crate::hash::{Canonical, Digest, FieldHasher, LAMBDA};
use crate::poc::OpeningProof;

use super::Block;

/// `H(τ)`: digest of the canonical proof encoding. Feeds both the block
/// weight and the challenge of the block `Δ` heights later.
pub fn proof_digest(proof: &OpeningProof) -> Digest {
    FieldHasher::new("tau").bytes(&proof.canonical_bytes()).finish()
}

/// `log((u / 2^λ)^(1/S))` for a digest `u` read as a λ-bit integer.
///
/// `u = 0` (and a non-positive space) yields `-inf`, the minimal weight.
pub fn log_weight_from_digest(u: &Digest, space: f64) -> f64 {
    if space <= 0.0 || !space.is_finite() {
        return f64::NEG_INFINITY;
    }
    let ln_u = u.ln_value();
    if ln_u == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    // u < 2^λ, but ln u can round up to λ·ln 2 at the very top of the range
    ((ln_u - LAMBDA as f64 * std::f64::consts::LN_2) / space).min(0.0)
}

/// Block weight `(H(τ)/2^λ)^(1/S)` in the log domain.
pub fn block_log_weight(proof: &OpeningProof, space: f64) -> f64 {
    log_weight_from_digest(&proof_digest(proof), space)
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn with(mut self, x: f64) -> Self {
        self.add(x);
        self
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sum of block weights along a branch. Empty branch weighs 0.
pub fn chain_weight<'a>(branch: impl IntoIterator<Item = &'a Block>) -> f64 {
    branch
        .into_iter()
        .fold(CompensatedSum::default(), |acc, b| acc.with(b.weight()))
        .value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn digest_from_top(top: u8) -> Digest {
        let mut d = [0xffu8; 32];
        d[31] = top;
        Digest(d)
    }

    #[test]
    fn top_of_range_is_nearly_one() {
        let u = Digest([0xff; 32]); // 2^256 - 1
        let lw = log_weight_from_digest(&u, 1.0);
        assert!(lw <= 0.0);
        assert!(lw.exp() > 1.0 - 1e-15);
    }

    #[test]
    fn zero_digest_is_minimal() {
        assert_eq!(log_weight_from_digest(&Digest::ZERO, 10.0), f64::NEG_INFINITY);
        assert_eq!(log_weight_from_digest(&Digest::ZERO, 10.0).exp(), 0.0);
        assert_eq!(log_weight_from_digest(&digest_from_top(1), 0.0), f64::NEG_INFINITY);
    }

    #[test]
    fn weight_increases_toward_one_with_space() {
        let u = digest_from_top(0x12);
        let mut prev = f64::NEG_INFINITY;
        for e in 0..=20 {
            let w = log_weight_from_digest(&u, (1u64 << e) as f64).exp();
            assert!(w > prev && w <= 1.0, "space 2^{e}");
            prev = w;
        }
    }

    #[test]
    fn weight_matches_direct_formula() {
        // u = 2^255 exactly -> w = (1/2)^(1/S)
        let mut d = [0u8; 32];
        d[31] = 0x80;
        for s in [1.0, 3.0, 1000.0] {
            let w = log_weight_from_digest(&Digest(d), s).exp();
            assert!((w - 0.5f64.powf(1.0 / s)).abs() < 1e-15);
        }
    }

    #[test]
    fn argmax_frequency_tracks_space_share() {
        let spaces = [100.0, 200.0, 700.0];
        let mut wins = [0u32; 3];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trials = 20_000;
        for _ in 0..trials {
            let mut best = (f64::NEG_INFINITY, 0);
            for (i, &s) in spaces.iter().enumerate() {
                let mut u = [0u8; 32];
                rng.fill_bytes(&mut u);
                let lw = log_weight_from_digest(&Digest(u), s);
                if lw > best.0 {
                    best = (lw, i);
                }
            }
            wins[best.1] += 1;
        }
        for (w, s) in wins.iter().zip(spaces) {
            assert!((*w as f64 / trials as f64 - s / 1000.0).abs() < 0.015);
        }
    }

    #[test]
    fn compensated_sum_of_identical_terms() {
        let w = 0.1234567890123;
        for n in [1usize, 10, 1000, 100_000] {
            let s = (0..n).fold(CompensatedSum::default(), |a, _| a.with(w)).value();
            assert!((s - n as f64 * w).abs() <= 1e-12 * n as f64 * w);
        }
    }
}
