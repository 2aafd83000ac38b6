use thiserror::Error;

use crate::multichain::joined_cap;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("α must lie in (0, 1), got {0}")]
    Alpha(f64),
    #[error("δ must be nonnegative, got {0}")]
    Slack(f64),
    #[error("market weight must be positive, got {0}")]
    Market(f64),
}

fn check(alpha: f64, delta: f64) -> Result<(), BoundError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(BoundError::Alpha(alpha));
    }
    if !(delta >= 0.0) {
        return Err(BoundError::Slack(delta));
    }
    Ok(())
}

/// Shared storage `α²/((1+δ)(1−α))·‖B‖` below which an adversary cannot
/// hold an `α` share of a chain's weight.
pub fn adversary_bound(alpha: f64, delta: f64, total: f64) -> Result<f64, BoundError> {
    check(alpha, delta)?;
    Ok(alpha * alpha / ((1.0 + delta) * (1.0 - alpha)) * total)
}

/// Exact least `s₀` that lets an adversary reach share `α` on a chain of
/// honest weight `b` in a market of total `total`.
///
/// The dedicated space must be `s = α·b/(1−α)` and fit under the joined
/// cap, which gives `s₀ = α·(‖B‖ + s)/(1+δ)`. Never below `α·‖B‖/(1+δ)`.
pub fn takeover_threshold(alpha: f64, delta: f64, b: f64, total: f64) -> Result<f64, BoundError> {
    check(alpha, delta)?;
    if !(b > 0.0) || total < b {
        return Err(BoundError::Market(b));
    }
    let s = alpha * b / (1.0 - alpha);
    Ok(alpha * (total + s) / (1.0 + delta))
}

/// Largest weight share an adversary with shared space `s0` and unlimited
/// dedicated space can take on a chain of honest weight `b`.
pub fn max_attacker_share(s0: f64, delta: f64, b: f64, total: f64) -> f64 {
    let cap = joined_cap(s0, b, total, delta);
    if cap <= 0.0 {
        0.0
    } else {
        cap / (b + cap)
    }
}
