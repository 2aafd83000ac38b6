use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{fork_choice, ChainView, CompensatedSum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarketError {
    #[error("market weight vector is empty")]
    Empty,
    #[error("market weight B_{0} is not a positive finite number")]
    NonPositive(usize),
}

/// Per-chain market weights `B` and their normalization `β = B/‖B‖`.
/// Chain `k` (1-based) is entry `k-1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarketWeights {
    b: Vec<f64>,
    beta: Vec<f64>,
    norm: f64,
}

impl MarketWeights {
    pub fn new(b: Vec<f64>) -> Result<Self, MarketError> {
        if b.is_empty() {
            return Err(MarketError::Empty);
        }
        if let Some(i) = b.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(MarketError::NonPositive(i + 1));
        }
        let norm = b.iter().fold(CompensatedSum::default(), |acc, &x| acc.with(x)).value();
        let beta = b.iter().map(|&x| x / norm).collect();
        Ok(MarketWeights { b, beta, norm })
    }

    /// Number of chains `M`.
    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.b
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// `‖B‖ = Σ B_k`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// `B_k` for the 1-based chain `k`.
    pub fn b(&self, k: usize) -> f64 {
        self.b[k - 1]
    }

    pub fn beta_k(&self, k: usize) -> f64 {
        self.beta[k - 1]
    }
}

/// Sum of the weights of the latest `window` blocks on the best branch of
/// `view` (fewer when the branch is shorter).
pub fn window_weight(view: &ChainView, window: u64) -> f64 {
    let branch = fork_choice(view);
    let from = branch.len().saturating_sub(window as usize);
    branch[from..]
        .iter()
        .fold(CompensatedSum::default(), |acc, b| acc.with(b.weight()))
        .value()
}

/// `B_i = μ · Σ weight(A_k^i)` over the latest `Δ` blocks of each chain's
/// best branch. A chain whose window sums to zero gets `min_weight`.
pub fn estimate_market_weights(views: &[ChainView], mu: f64, window: u64, min_weight: f64) -> Result<MarketWeights, MarketError> {
    let b = views
        .iter()
        .map(|v| {
            let w = mu * window_weight(v, window);
            if w > 0.0 {
                w
            } else {
                min_weight
            }
        })
        .collect();
    MarketWeights::new(b)
}
