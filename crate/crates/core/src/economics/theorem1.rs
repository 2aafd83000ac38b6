use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::multichain::MarketWeights;

use super::{numeric_optimum, optimal_partition, total_utility, Partition, UtilityParams};

/// Closed form against the numeric oracle on one `(c, B)`.
#[derive(Clone, Debug, Serialize)]
pub struct OptimumGap {
    pub c: f64,
    pub market: Vec<f64>,
    pub closed_form: Partition,
    pub numeric: Partition,
    pub closed_utility: f64,
    pub numeric_utility: f64,
    /// `‖numeric − closed‖∞` in grid steps.
    pub distance_steps: f64,
    /// `(U(numeric) − U(closed)) / U(closed)`.
    pub relative_gap: f64,
}

impl OptimumGap {
    pub fn within(&self, max_steps: f64, max_rel: f64) -> bool {
        self.distance_steps <= max_steps && self.relative_gap.abs() <= max_rel
    }
}

pub fn compare_optimum(c: f64, market: &MarketWeights, p: &UtilityParams, resolution: f64, seed: u64) -> OptimumGap {
    let closed = optimal_partition(c, market);
    let numeric = numeric_optimum(c, market, p, resolution, seed);
    let uc = total_utility(&closed, market, p).expect("shapes agree");
    let un = total_utility(&numeric, market, p).expect("shapes agree");
    OptimumGap {
        c,
        market: market.weights().to_vec(),
        distance_steps: closed.max_abs_diff(&numeric) / (c * resolution),
        relative_gap: (un - uc) / uc,
        closed_form: closed,
        numeric,
        closed_utility: uc,
        numeric_utility: un,
    }
}

/// Ranges `(c, B_k)` are drawn from.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct InstanceRange {
    pub c: (f64, f64),
    pub b: (f64, f64),
    pub max_chains: usize,
}

impl InstanceRange {
    /// A small participant facing a large market.
    pub const SMALL_PLAYER: InstanceRange = InstanceRange {
        c: (1.0, 10.0),
        b: (1e6, 1e7),
        max_chains: 4,
    };
    pub const BROAD: InstanceRange = InstanceRange {
        c: (0.1, 1e3),
        b: (1.0, 1e3),
        max_chains: 4,
    };
}

/// `n` random instances, `M` uniform in `1..=max_chains`, `c` and `B_k`
/// log-uniform in their ranges.
pub fn random_instances(seed: u64, n: usize, range: InstanceRange) -> Vec<(f64, MarketWeights)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_uniform = |rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)| (rng.gen_range(lo.ln()..=hi.ln())).exp();
    (0..n)
        .map(|_| {
            let m = rng.gen_range(1..=range.max_chains);
            let c = log_uniform(&mut rng, range.c);
            let b = (0..m).map(|_| log_uniform(&mut rng, range.b)).collect();
            (c, MarketWeights::new(b).expect("positive weights"))
        })
        .collect()
}
