use rand::seq::index::sample_weighted;
use rand::Rng;

use crate::economics::{chain_utility, Partition, UtilityParams};
use crate::multichain::{capped_space, MarketWeights};

use super::checks::{Checker, SeenMarket};
use super::rng::stream;
use super::{ChainRound, Participant, RoundReport, ScenarioConfig};

/// One participant's round: allocation, view and per-chain outcomes, all
/// indexed by global chain id (slot 0 unused except in `s`).
pub(crate) struct Alloc {
    pub s: Vec<f64>,
    pub view: Vec<f64>,
    pub norm: f64,
    pub beta_sum: f64,
    pub eff: Vec<f64>,
    pub w: Vec<f64>,
    pub utility: Vec<f64>,
}

pub(crate) fn active_chains(cfg: &ScenarioConfig, round: u64) -> Vec<usize> {
    (1..=cfg.chains).filter(|&k| cfg.is_active(k, round)).collect()
}

pub(crate) fn utility_params(cfg: &ScenarioConfig) -> UtilityParams {
    UtilityParams {
        r: cfg.payout(),
        omega: cfg.omega,
        cap_slack: cfg.cap_slack,
        cap_rule: cfg.cap_rule,
    }
}

/// Every participant allocates against the market left by the others'
/// effective space `prev_eff`, floored per chain.
pub(crate) fn allocate(cfg: &ScenarioConfig, people: &[Participant], prev_eff: &[Vec<f64>], active: &[usize]) -> Vec<Alloc> {
    let m = cfg.chains;
    let up = utility_params(cfg);
    let mut totals = vec![0.0; m + 1];
    for e in prev_eff {
        for k in 1..=m {
            totals[k] += e[k];
        }
    }
    people
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut view = vec![0.0; m + 1];
            for &k in active {
                view[k] = (totals[k] - prev_eff[i][k]).max(cfg.floor(k));
            }
            let market = MarketWeights::new(active.iter().map(|&k| view[k]).collect()).expect("floored weights are positive");
            let s = p.strategy.allocate(p.capacity, &market, active, m, cfg.cap_slack);
            let local = Partition::new(std::iter::once(s[0]).chain(active.iter().map(|&k| s[k])).collect());
            let mut eff = vec![0.0; m + 1];
            let mut w = vec![0.0; m + 1];
            let mut utility = vec![0.0; m + 1];
            for (j, &k) in active.iter().enumerate() {
                eff[k] = capped_space(&local, &market, j + 1, cfg.cap_slack, cfg.cap_rule).expect("shapes agree");
                w[k] = if eff[k] > 0.0 { eff[k] / (view[k] + eff[k]) } else { 0.0 };
                utility[k] = chain_utility(&local, &market, j + 1, &up).expect("shapes agree");
            }
            Alloc {
                s,
                norm: market.norm(),
                beta_sum: market.beta().iter().sum(),
                view,
                eff,
                w,
                utility,
            }
        })
        .collect()
}

/// Runs the allocation map to its fixed point before round 0.
pub(crate) fn bootstrap(cfg: &ScenarioConfig, people: &[Participant]) -> Vec<Vec<f64>> {
    let active = active_chains(cfg, 0);
    let mut eff = vec![vec![0.0; cfg.chains + 1]; people.len()];
    for _ in 0..64 {
        let next: Vec<Vec<f64>> = allocate(cfg, people, &eff, &active).into_iter().map(|a| a.eff).collect();
        if next == eff {
            break;
        }
        eff = next;
    }
    eff
}

pub(crate) fn run(cfg: &ScenarioConfig, people: &[Participant]) -> (Vec<RoundReport>, Checker) {
    let n = people.len();
    let m = cfg.chains;
    let payout = cfg.payout();
    let per_leader = payout / cfg.lsize as f64;
    let mut checker = Checker {
        payout,
        lsize: cfg.lsize,
        cap_slack: cfg.cap_slack,
        violations: Vec::new(),
    };
    let mut prev_eff = bootstrap(cfg, people);
    let mut chain_weight = vec![0.0; m + 1];
    let mut revenue = vec![0.0; n];
    let mut value = vec![0.0; n];
    let mut expected = vec![0.0; n];
    let mut reports = Vec::with_capacity(cfg.rounds as usize);

    for round in 0..cfg.rounds {
        let active = active_chains(cfg, round);
        let allocs = allocate(cfg, people, &prev_eff, &active);
        let mut chains = Vec::with_capacity(m);
        for k in 1..=m {
            let weights: Vec<f64> = allocs.iter().map(|a| a.w[k]).collect();
            let mut c = ChainRound {
                chain: k,
                active: cfg.is_active(k, round),
                leaders: Vec::new(),
                chain_weight: chain_weight[k],
                market_weight: 0.0,
                shared: allocs.iter().map(|a| a.s[0]).collect(),
                dedicated: allocs.iter().map(|a| a.s[k]).collect(),
                weights,
            };
            if !c.active {
                chains.push(c);
                continue;
            }
            let total_w: f64 = c.weights.iter().sum();
            let eligible = c.weights.iter().filter(|w| **w > 0.0).count();
            let mut credited = 0.0;
            if eligible > 0 {
                let mut rng = stream(cfg.seed, round, k, "leader");
                let amount = cfg.lsize.min(eligible);
                let picked = sample_weighted(&mut rng, n, |i| c.weights[i], amount).expect("positive weights");
                c.leaders = picked.into_iter().collect();
                for &l in &c.leaders {
                    revenue[l] += per_leader;
                    value[l] += per_leader * cfg.omega * allocs[l].view[k];
                    credited += per_leader;
                }
                for (i, a) in allocs.iter().enumerate() {
                    expected[i] += a.utility[k] / total_w;
                }
            }
            let total_eff: f64 = allocs.iter().map(|a| a.eff[k]).sum();
            if total_eff > 0.0 {
                // the best of all miners' block weights is distributed as u^(1/ΣS)
                let u: f64 = 1.0 - stream(cfg.seed, round, k, "weight").gen::<f64>();
                chain_weight[k] += u.powf(1.0 / total_eff);
            }
            c.chain_weight = chain_weight[k];
            c.market_weight = total_eff.max(cfg.floor(k));
            let seen: Vec<SeenMarket> = allocs
                .iter()
                .map(|a| SeenMarket {
                    b: a.view[k],
                    norm: a.norm,
                    beta_sum: a.beta_sum,
                })
                .collect();
            checker.chain_round(round, &c, &seen, credited);
            chains.push(c);
        }
        prev_eff = allocs.into_iter().map(|a| a.eff).collect();
        reports.push(RoundReport {
            round,
            chains,
            revenue: revenue.clone(),
            value: value.clone(),
            expected: expected.clone(),
        });
    }
    (reports, checker)
}
