use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::hash::FieldHasher;

/// Independent stream for `(round, chain, purpose)` under a master seed.
pub fn stream(seed: u64, round: u64, chain: usize, purpose: &str) -> ChaCha8Rng {
    let d = FieldHasher::new("rng")
        .u64(seed)
        .u64(round)
        .u64(chain as u64)
        .bytes(purpose.as_bytes())
        .finish();
    ChaCha8Rng::from_seed(d.0)
}
