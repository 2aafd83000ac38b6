use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::economics::Partition;

use super::MarketWeights;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElectionError {
    #[error("market weights sum to zero")]
    ZeroMarket,
    #[error("chain index {k} outside 1..={chains}")]
    BadChain { k: usize, chains: usize },
    #[error("partition has {got} chain slots, market has {expected}")]
    Shape { expected: usize, got: usize },
}

/// How the cap `(1+δ)·β·s₀` is normalized when a participant joins.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapRule {
    /// `β′_k = (B_k + s_k)/(‖B‖ + s_k)`: the participant's own space joins
    /// the market before normalizing.
    #[default]
    Joined,
    /// `β′ = β`: the simplification used in the incentive analysis.
    Static,
}

/// `S̃_k = min(s_k, (1+δ)·β_k·s₀)`, the space that counts toward block weight.
pub fn effective_space(partition: &Partition, beta: &[f64], cap_slack: f64, k: usize) -> f64 {
    let s0 = partition.shared();
    let sk = partition.chain(k);
    let beta_k = beta.get(k.wrapping_sub(1)).copied().unwrap_or(0.0);
    sk.min((1.0 + cap_slack) * beta_k * s0)
}

/// Largest `x` with `x ≤ (1+δ)·s₀·(B_k + x)/(‖B‖ + x)`: the positive root
/// of `x² + x(‖B‖ − a) − a·B_k = 0` with `a = (1+δ)·s₀`.
pub fn joined_cap(s0: f64, b_k: f64, b_norm: f64, cap_slack: f64) -> f64 {
    let a = (1.0 + cap_slack) * s0;
    let lin = b_norm - a;
    let c = a * b_k;
    if c <= 0.0 {
        return (-lin).max(0.0);
    }
    let disc = (lin * lin + 4.0 * c).sqrt();
    // pick the cancellation-free form
    if lin >= 0.0 {
        2.0 * c / (lin + disc)
    } else {
        (disc - lin) / 2.0
    }
}

fn check(partition: &Partition, market: &MarketWeights, k: usize) -> Result<(), ElectionError> {
    let chains = market.len();
    if partition.chains() != chains {
        return Err(ElectionError::Shape {
            expected: chains,
            got: partition.chains(),
        });
    }
    if k == 0 || k > chains {
        return Err(ElectionError::BadChain { k, chains });
    }
    if market.norm() <= 0.0 {
        return Err(ElectionError::ZeroMarket);
    }
    Ok(())
}

/// `w(s, B, k)`: leader chance on chain `k` with the joined normalization.
pub fn election_weight(partition: &Partition, market: &MarketWeights, k: usize, cap_slack: f64) -> Result<f64, ElectionError> {
    election_weight_with(partition, market, k, cap_slack, CapRule::Joined)
}

/// Space of `partition` that counts on chain `k` under `rule`.
pub fn capped_space(
    partition: &Partition,
    market: &MarketWeights,
    k: usize,
    cap_slack: f64,
    rule: CapRule,
) -> Result<f64, ElectionError> {
    check(partition, market, k)?;
    let sk = partition.chain(k);
    Ok(match rule {
        CapRule::Joined => {
            let (b_k, norm) = (market.b(k), market.norm());
            // s_k ≤ cap ⇔ s_k ≤ (1+δ)·β′_k·s₀, since the cap inequality is a convex quadratic in s_k
            sk.min(joined_cap(partition.shared(), b_k, norm, cap_slack))
        }
        CapRule::Static => effective_space(partition, market.beta(), cap_slack, k),
    })
}

pub fn election_weight_with(
    partition: &Partition,
    market: &MarketWeights,
    k: usize,
    cap_slack: f64,
    rule: CapRule,
) -> Result<f64, ElectionError> {
    let eff = capped_space(partition, market, k, cap_slack, rule)?;
    if eff <= 0.0 {
        return Ok(0.0);
    }
    Ok(eff / (market.b(k) + eff))
}
