use serde::{Deserialize, Serialize};

use crate::economics::{adversary_bound, lemma2_transform, optimal_partition, Partition};
use crate::multichain::MarketWeights;

/// How a participant splits its capacity given its view of the market.
///
/// Chain indices are 1-based and global; while a targeted chain is not yet
/// active the attacking strategies keep everything in `s₀`.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Strategy {
    /// `(c/2, (c/2)·β)`.
    #[default]
    Optimal,
    /// `c/(M+1)` in every slot.
    Uniform,
    AllShared,
    AllOneChain { chain: usize },
    /// Everything shared except a token `ε` on `target`: proof duplication
    /// without dedicated space.
    NewbornAttacker { target: usize, epsilon: f64 },
    /// `s₀ = fraction · adversary_bound(α, δ, ‖B‖)`, the rest on `target`.
    CappedShared { target: usize, fraction: f64, alpha: f64 },
    /// Fixed fractions of `c` per slot (`s₀` first, then every chain).
    Fixed { split: Vec<f64> },
    /// `Fixed`, repaired by the cap-violation transform against `β`.
    Repaired { split: Vec<f64> },
}

impl Strategy {
    pub(crate) fn validate(&self, chains: usize) -> Result<(), String> {
        let chain_ok = |k: usize| {
            if k == 0 || k > chains {
                Err(format!("chain {k} outside 1..={chains}"))
            } else {
                Ok(())
            }
        };
        match self {
            Strategy::Optimal | Strategy::Uniform | Strategy::AllShared => Ok(()),
            Strategy::AllOneChain { chain } => chain_ok(*chain),
            Strategy::NewbornAttacker { target, epsilon } => {
                chain_ok(*target)?;
                if !(*epsilon >= 0.0) {
                    return Err("epsilon must be ≥ 0".into());
                }
                Ok(())
            }
            Strategy::CappedShared { target, fraction, alpha } => {
                chain_ok(*target)?;
                if !(*fraction >= 0.0) || !(*alpha > 0.0 && *alpha < 1.0) {
                    return Err("fraction must be ≥ 0 and alpha in (0, 1)".into());
                }
                Ok(())
            }
            Strategy::Fixed { split } | Strategy::Repaired { split } => {
                if split.len() != chains + 1 || split.iter().any(|x| !(*x >= 0.0)) {
                    return Err(format!("split needs {} nonnegative entries", chains + 1));
                }
                if (split.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                    return Err("split must sum to 1".into());
                }
                Ok(())
            }
        }
    }

    /// Whether the strategy aims at one chain in particular.
    pub fn target(&self) -> Option<usize> {
        match self {
            Strategy::NewbornAttacker { target, .. } | Strategy::CappedShared { target, .. } => Some(*target),
            _ => None,
        }
    }

    /// Split of capacity `c` over `s₀` and the `active` chains, given the
    /// market `view` over those chains (same order). Returns a full-length
    /// vector `(s₀, s₁, …, s_M)` with zeros on inactive chains.
    pub fn allocate(&self, c: f64, view: &MarketWeights, active: &[usize], chains: usize, cap_slack: f64) -> Vec<f64> {
        let mut s = vec![0.0; chains + 1];
        let pos = |k: usize| active.iter().position(|&a| a == k);
        match self {
            Strategy::Optimal => {
                let opt = optimal_partition(c, view);
                s[0] = opt.shared();
                for (i, &k) in active.iter().enumerate() {
                    s[k] = opt.chain(i + 1);
                }
            }
            Strategy::Uniform => {
                let share = c / (active.len() + 1) as f64;
                s[0] = share;
                for &k in active {
                    s[k] = share;
                }
            }
            Strategy::AllShared => s[0] = c,
            Strategy::AllOneChain { chain } => {
                if pos(*chain).is_some() {
                    s[*chain] = c;
                } else {
                    s[0] = c;
                }
            }
            Strategy::NewbornAttacker { target, epsilon } => {
                let eps = epsilon.min(c);
                if pos(*target).is_some() {
                    s[*target] = eps;
                    s[0] = c - eps;
                } else {
                    s[0] = c;
                }
            }
            Strategy::CappedShared { target, fraction, alpha } => {
                if pos(*target).is_some() {
                    let bound = adversary_bound(*alpha, cap_slack, view.norm()).expect("validated alpha");
                    s[0] = (fraction * bound).min(c);
                    s[*target] = c - s[0];
                } else {
                    s[0] = c;
                }
            }
            Strategy::Fixed { split } | Strategy::Repaired { split } => {
                // inactive chains' share stays in s₀
                s[0] = c * split[0];
                for k in 1..=chains {
                    if pos(k).is_some() {
                        s[k] = c * split[k];
                    } else {
                        s[0] += c * split[k];
                    }
                }
                if matches!(self, Strategy::Repaired { .. }) {
                    let local = Partition::new(std::iter::once(s[0]).chain(active.iter().map(|&k| s[k])).collect());
                    let (fixed, _) = lemma2_transform(&local, view.beta());
                    s[0] = fixed.shared();
                    for (i, &k) in active.iter().enumerate() {
                        s[k] = fixed.chain(i + 1);
                    }
                }
            }
        }
        s
    }
}
