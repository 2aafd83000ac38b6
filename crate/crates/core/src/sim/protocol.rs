use crate::chain::{genesis_blocks, ChainView};
use crate::hash::FieldHasher;
use crate::keys::{Certifier, KeyPair};
use crate::multichain::{assemble_block, effective_space, verify_multichain_block, MarketWeights, MinerState, RegistryState};
use crate::economics::Partition;
use crate::params::ProtocolParams;

use super::checks::{Checker, SeenMarket};
use super::functionality::bootstrap;
use super::{ChainRound, ConfigError, Participant, RoundReport, ScenarioConfig};

/// Largest power of two not above `x`, or 0 below 1.
fn pow2_floor(x: f64) -> u64 {
    if x < 1.0 {
        0
    } else {
        1u64 << (x.log2().floor() as u32).min(62)
    }
}

fn records(round: u64, chain: usize, count: usize) -> Vec<Vec<u8>> {
    (0..count as u64)
        .map(|j| FieldHasher::new("tx").u64(round).u64(chain as u64).u64(j).finish().0.to_vec())
        .collect()
}

/// Market from every miner's effective space, iterated to a fixed point
/// since `S̃` depends on `β`.
fn setup_market(cfg: &ScenarioConfig, parts: &[Partition]) -> MarketWeights {
    let m = cfg.chains;
    let mut b: Vec<f64> = (1..=m)
        .map(|k| parts.iter().map(|p| p.chain(k)).sum::<f64>().max(cfg.floor(k)))
        .collect();
    for _ in 0..64 {
        let next: Vec<f64> = (1..=m)
            .map(|k| {
                let beta: Vec<f64> = b.iter().map(|x| x / b.iter().sum::<f64>()).collect();
                parts
                    .iter()
                    .map(|p| effective_space(p, &beta, cfg.cap_slack, k))
                    .sum::<f64>()
                    .max(cfg.floor(k))
            })
            .collect();
        if next == b {
            break;
        }
        b = next;
    }
    MarketWeights::new(b).expect("floored weights are positive")
}

/// Setup-time commitments, then every round each miner assembles a block on
/// each chain, every block is verified, and fork choice names the leader.
pub(crate) fn run(cfg: &ScenarioConfig, people: &[Participant], keys: &[KeyPair]) -> Result<(Vec<RoundReport>, Checker), ConfigError> {
    let n = people.len();
    let m = cfg.chains;
    let payout = cfg.payout();
    let params = ProtocolParams {
        window: cfg.window,
        challenge_count: cfg.challenge_count,
        audit_count: cfg.audit_count,
        degree: cfg.degree,
        cap_slack: cfg.cap_slack,
        mu: cfg.mu,
        min_market_weight: cfg.min_market_weight,
        max_records: ProtocolParams::default().max_records.max(cfg.tx_per_round),
        ..ProtocolParams::default()
    };

    let eff0 = bootstrap(cfg, people);
    let active: Vec<usize> = (1..=m).collect();
    let allocs = super::functionality::allocate(cfg, people, &eff0, &active);
    let mut miners = Vec::with_capacity(n);
    let mut certifier = Certifier::new();
    for (i, a) in allocs.iter().enumerate() {
        let sizes: Vec<u64> = a.s.iter().map(|&x| pow2_floor(x)).collect();
        let miner = MinerState::new(keys[i].clone(), &sizes, cfg.degree)
            .map_err(|e| ConfigError::Invalid(format!("participant {:?}: {e}", people[i].name)))?;
        certifier.enroll(&keys[i]);
        miners.push(miner);
    }
    for k in 1..=m {
        certifier.enroll(&crate::chain::genesis_keys(k as u32));
    }
    let parts: Vec<Partition> = miners.iter().map(MinerState::partition).collect();
    let market = setup_market(cfg, &parts);

    let eff: Vec<Vec<f64>> = parts
        .iter()
        .map(|p| {
            std::iter::once(0.0)
                .chain((1..=m).map(|k| effective_space(p, market.beta(), cfg.cap_slack, k)))
                .collect()
        })
        .collect();
    let seen: Vec<Vec<SeenMarket>> = (1..=m)
        .map(|k| {
            (0..n)
                .map(|i| {
                    let others = |j: usize| (market.b(j) - eff[i][j]).max(cfg.floor(j));
                    let norm: f64 = (1..=m).map(others).sum();
                    SeenMarket {
                        b: others(k),
                        norm,
                        beta_sum: market.beta().iter().sum(),
                    }
                })
                .collect()
        })
        .collect();
    let weights: Vec<Vec<f64>> = (1..=m)
        .map(|k| {
            (0..n)
                .map(|i| {
                    let e = eff[i][k];
                    if e > 0.0 {
                        e / (seen[k - 1][i].b + e)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();

    let mut views: Vec<ChainView> = (1..=m)
        .map(|k| ChainView::new(k as u32, genesis_blocks(k as u32, &params)).expect("genesis links"))
        .collect();
    let mut registry = RegistryState::new();
    let mut checker = Checker {
        payout,
        lsize: 1,
        cap_slack: cfg.cap_slack,
        violations: Vec::new(),
    };
    let mut revenue = vec![0.0; n];
    let mut value = vec![0.0; n];
    let mut expected = vec![0.0; n];
    let mut reports = Vec::with_capacity(cfg.rounds as usize);

    for round in 0..cfg.rounds {
        let mut chains = Vec::with_capacity(m);
        for k in 1..=m {
            let view = &mut views[k - 1];
            let w = &weights[k - 1];
            let mut candidates = Vec::new();
            for (i, miner) in miners.iter().enumerate() {
                if eff[i][k] <= 0.0 {
                    continue;
                }
                let block = match assemble_block(miner, view, &market, &params, records(round, k, cfg.tx_per_round)) {
                    Ok(b) => b,
                    Err(e) => {
                        checker.violations.push(super::Violation {
                            round,
                            chain: k,
                            participant: Some(i),
                            check: "block-assembly",
                            detail: e.to_string(),
                        });
                        continue;
                    }
                };
                match verify_multichain_block(view, &block, &mut registry, &market, &certifier, &params) {
                    Ok(()) => candidates.push((i, block)),
                    Err(reason) => checker.violations.push(super::Violation {
                        round,
                        chain: k,
                        participant: Some(i),
                        check: "block-verification",
                        detail: reason.to_string(),
                    }),
                }
            }
            let mut hashes = Vec::with_capacity(candidates.len());
            for (i, b) in candidates {
                hashes.push((i, view.insert(b).expect("verified block extends the view")));
            }
            let best = view.best_tip();
            let mut c = ChainRound {
                chain: k,
                active: true,
                leaders: hashes.iter().filter(|(_, h)| *h == best).map(|(i, _)| *i).collect(),
                chain_weight: view.branch_weight(&best).expect("tip stored"),
                market_weight: market.b(k),
                weights: w.clone(),
                shared: parts.iter().map(Partition::shared).collect(),
                dedicated: parts.iter().map(|p| p.chain(k)).collect(),
            };
            let height = view.get(&best).expect("tip stored").height;
            view.prune_forks(&best, height);
            let mut credited = 0.0;
            for &l in &c.leaders {
                revenue[l] += payout;
                value[l] += payout * cfg.omega * seen[k - 1][l].b;
                credited += payout;
            }
            let total_w: f64 = w.iter().sum();
            if total_w > 0.0 {
                for i in 0..n {
                    expected[i] += payout * w[i] * cfg.omega * seen[k - 1][i].b / total_w;
                }
            }
            c.leaders.truncate(1);
            checker.chain_round(round, &c, &seen[k - 1], credited);
            chains.push(c);
        }
        reports.push(RoundReport {
            round,
            chains,
            revenue: revenue.clone(),
            value: value.clone(),
            expected: expected.clone(),
        });
    }
    Ok((reports, checker))
}
