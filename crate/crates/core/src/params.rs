use serde::{Deserialize, Serialize};

/// Protocol constants shared by block assembly and verification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolParams {
    /// Δ: start-up blocks per chain, challenge look-back, market-weight window.
    pub window: u64,
    /// t: indices opened per block proof.
    pub challenge_count: usize,
    /// q: indices opened by the commitment audit at setup.
    pub audit_count: usize,
    /// In-degree bound of the pebbling graphs.
    pub degree: u32,
    /// δ: slack on the effective-space cap.
    pub cap_slack: f64,
    /// μ: market weight per unit of summed block weight.
    pub mu: f64,
    /// Market weight assigned to a chain with no blocks.
    pub min_market_weight: f64,
    /// Graph size behind genesis block proofs.
    pub genesis_space: u64,
    /// Upper bound on transaction payloads per block.
    pub max_records: usize,
    /// Relative tolerance when recomputing a declared block log-weight.
    pub weight_tolerance: f64,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams {
            window: 4,
            challenge_count: 30,
            audit_count: 30,
            degree: 4,
            cap_slack: 0.1,
            mu: 1.0,
            min_market_weight: 1e-3,
            genesis_space: 16,
            max_records: 64,
            weight_tolerance: 1e-9,
        }
    }
}
