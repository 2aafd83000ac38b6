use crate::economics::adversary_bound;

use super::{ChainRound, Violation};

/// Per-participant view of one chain in one round.
pub(crate) struct SeenMarket {
    /// `B_k^{(−i)}`.
    pub b: f64,
    /// `‖B^{(−i)}‖`.
    pub norm: f64,
    /// `Σ β` of the participant's view.
    pub beta_sum: f64,
}

pub(crate) struct Checker {
    pub payout: f64,
    pub lsize: usize,
    pub cap_slack: f64,
    pub violations: Vec<Violation>,
}

const TOL: f64 = 1e-12;

impl Checker {
    fn flag(&mut self, round: u64, chain: usize, participant: Option<usize>, check: &'static str, detail: String) {
        log::warn!("round {round} chain {chain}: {check} {detail}");
        self.violations.push(Violation {
            round,
            chain,
            participant,
            check,
            detail,
        });
    }

    /// Leader count, revenue conservation, β normalization, the min-cap
    /// ceiling `w ≤ s_k/(B_k + s_k)` and the storage bound: below
    /// `adversary_bound(1/3, δ, ‖B‖)` shared space the weight stays under 1/3.
    pub fn chain_round(&mut self, round: u64, c: &ChainRound, seen: &[SeenMarket], credited: f64) {
        let k = c.chain;
        let eligible = c.weights.iter().filter(|w| **w > 0.0).count();
        if eligible > 0 {
            if c.leaders.len() != self.lsize {
                let d = format!("{} leaders, lsize {} ({eligible} eligible)", c.leaders.len(), self.lsize);
                self.flag(round, k, None, "leader-count", d);
            }
            if (credited - self.payout).abs() > TOL * self.payout.max(1.0) {
                self.flag(round, k, None, "conservation", format!("credited {credited}, payout {}", self.payout));
            }
        } else if !c.leaders.is_empty() {
            self.flag(round, k, None, "leader-count", "leader without election weight".into());
        }
        for (i, m) in seen.iter().enumerate() {
            if (m.beta_sum - 1.0).abs() > 1e-9 {
                self.flag(round, k, Some(i), "beta-sum", format!("Σβ = {}", m.beta_sum));
            }
            let w = c.weights[i];
            let sk = c.dedicated[i];
            let ceiling = if sk > 0.0 { sk / (m.b + sk) } else { 0.0 };
            if w > ceiling + TOL {
                self.flag(round, k, Some(i), "min-cap", format!("w = {w} > s_k/(B_k+s_k) = {ceiling}"));
            }
            let bound = adversary_bound(1.0 / 3.0, self.cap_slack, m.norm).expect("α = 1/3 is valid");
            if c.shared[i] < bound && w >= 1.0 / 3.0 {
                self.flag(
                    round,
                    k,
                    Some(i),
                    "storage-bound",
                    format!("s₀ = {} below bound {bound} yet w = {w}", c.shared[i]),
                );
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn checker() -> Checker {
        Checker {
            payout: 2.0,
            lsize: 1,
            cap_slack: 0.1,
            violations: Vec::new(),
        }
    }

    fn round(leaders: Vec<usize>, weights: Vec<f64>, shared: Vec<f64>, dedicated: Vec<f64>) -> ChainRound {
        ChainRound {
            chain: 1,
            active: true,
            leaders,
            chain_weight: 0.0,
            market_weight: 10.0,
            weights,
            shared,
            dedicated,
        }
    }

    fn seen(b: f64, norm: f64) -> SeenMarket {
        SeenMarket { b, norm, beta_sum: 1.0 }
    }

    fn checks(c: &Checker) -> Vec<&'static str> {
        c.violations.iter().map(|v| v.check).collect()
    }

    #[test]
    fn clean_round_passes() {
        let mut c = checker();
        c.chain_round(0, &round(vec![0], vec![0.5, 0.5], vec![10.0, 10.0], vec![5.0, 5.0]), &[seen(5.0, 10.0), seen(5.0, 10.0)], 2.0);
        assert!(c.violations.is_empty());
    }

    #[test]
    fn each_check_fires() {
        let mut c = checker();
        c.chain_round(0, &round(vec![], vec![0.5], vec![10.0], vec![5.0]), &[seen(5.0, 10.0)], 0.0);
        assert_eq!(checks(&c), vec!["leader-count", "conservation"]);

        let mut c = checker();
        c.chain_round(0, &round(vec![0], vec![0.9], vec![10.0], vec![1.0]), &[seen(5.0, 10.0)], 2.0);
        assert_eq!(checks(&c), vec!["min-cap"]);

        let mut c = checker();
        c.chain_round(0, &round(vec![0], vec![0.4], vec![1.0], vec![10.0]), &[seen(5.0, 100.0)], 2.0);
        assert_eq!(checks(&c), vec!["storage-bound"]);

        let mut c = checker();
        let mut s = seen(5.0, 10.0);
        s.beta_sum = 0.9;
        c.chain_round(0, &round(vec![0], vec![0.1], vec![10.0], vec![5.0]), &[s], 2.0);
        assert_eq!(checks(&c), vec!["beta-sum"]);

        let mut c = checker();
        c.chain_round(0, &round(vec![0], vec![0.0], vec![10.0], vec![5.0]), &[seen(5.0, 10.0)], 2.0);
        assert_eq!(checks(&c), vec!["leader-count"]);
    }
}
