use serde::{Deserialize, Serialize};

use crate::multichain::{election_weight_with, CapRule, ElectionError, MarketWeights};

use super::Partition;

/// Constants of the utility `val(s, B, k) = r · w(s, B, k) · ω·B_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityParams {
    pub r: f64,
    pub omega: f64,
    pub cap_slack: f64,
    pub cap_rule: CapRule,
}

impl Default for UtilityParams {
    fn default() -> Self {
        UtilityParams {
            r: 1.0,
            omega: 1.0,
            cap_slack: 0.1,
            cap_rule: CapRule::Joined,
        }
    }
}

impl UtilityParams {
    /// `r = ω = 1`, `δ = 0`, exact joined normalization.
    pub fn exact() -> Self {
        UtilityParams {
            cap_slack: 0.0,
            ..Self::default()
        }
    }

    /// `r = ω = 1`, `δ = 0`, `β′ = β`.
    pub fn static_cap() -> Self {
        UtilityParams {
            cap_slack: 0.0,
            cap_rule: CapRule::Static,
            ..Self::default()
        }
    }
}

/// `val(s, B, k)`: expected per-round value from chain `k`.
pub fn chain_utility(s: &Partition, market: &MarketWeights, k: usize, p: &UtilityParams) -> Result<f64, ElectionError> {
    let w = election_weight_with(s, market, k, p.cap_slack, p.cap_rule)?;
    Ok(p.r * w * p.omega * market.b(k))
}

/// `U(s, B) = Σ_k val(s, B, k)`.
pub fn total_utility(s: &Partition, market: &MarketWeights, p: &UtilityParams) -> Result<f64, ElectionError> {
    (1..=market.len()).map(|k| chain_utility(s, market, k, p)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(b: &[f64]) -> MarketWeights {
        MarketWeights::new(b.to_vec()).unwrap()
    }

    #[test]
    fn chain_utility_examples() {
        let p = UtilityParams::exact();
        let s = Partition::new(vec![10.0, 5.0, 0.0]);
        let v = chain_utility(&s, &m(&[100.0, 100.0]), 1, &p).unwrap();
        assert!((v - 5.0 / 105.0 * 100.0).abs() < 1e-12);
        assert!((v - 4.7619).abs() < 1e-4);
        assert_eq!(chain_utility(&s, &m(&[100.0, 100.0]), 2, &p).unwrap(), 0.0);
    }

    #[test]
    fn linear_in_r() {
        let s = Partition::new(vec![3.0, 1.0, 2.0]);
        let b = m(&[10.0, 20.0]);
        let p1 = UtilityParams::default();
        let p2 = UtilityParams { r: 2.0, ..p1 };
        let u1 = total_utility(&s, &b, &p1).unwrap();
        let u2 = total_utility(&s, &b, &p2).unwrap();
        assert!((u2 - 2.0 * u1).abs() < 1e-12);
    }

    #[test]
    fn single_chain_and_symmetry() {
        let p = UtilityParams::exact();
        let s1 = Partition::new(vec![2.0, 1.5]);
        let b1 = m(&[50.0]);
        assert_eq!(total_utility(&s1, &b1, &p).unwrap(), chain_utility(&s1, &b1, 1, &p).unwrap());

        let s = Partition::new(vec![2.0, 1.0, 1.0, 1.0]);
        let b = m(&[30.0, 30.0, 30.0]);
        let per = chain_utility(&s, &b, 1, &p).unwrap();
        assert!((total_utility(&s, &b, &p).unwrap() - 3.0 * per).abs() < 1e-12);
    }

    #[test]
    fn golden_optimal_split_value() {
        // c = 4, B = (100, 100), s = (2, 1, 1): both slots uncapped,
        // U = 2 · 100 · 1/101
        let u = total_utility(&Partition::new(vec![2.0, 1.0, 1.0]), &m(&[100.0, 100.0]), &UtilityParams::exact()).unwrap();
        assert!((u - 200.0 / 101.0).abs() < 1e-12);
    }
}
