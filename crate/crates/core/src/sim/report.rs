use std::io::{self, Write};

use serde::Serialize;

use crate::keys::PublicKey;

use super::{Mode, Participant};

/// Outcome of one round on one chain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainRound {
    pub chain: usize,
    pub active: bool,
    /// Participant indices, in draw order.
    pub leaders: Vec<usize>,
    /// Cumulative weight of the chain after this round.
    pub chain_weight: f64,
    /// `B_k` over all participants' effective space, floored.
    pub market_weight: f64,
    /// Election weight `w(s^i, B^{(−i)}, k)` of every participant.
    pub weights: Vec<f64>,
    /// Shared space `s₀` of every participant this round.
    pub shared: Vec<f64>,
    /// Dedicated space `s_k` of every participant this round.
    pub dedicated: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundReport {
    pub round: u64,
    pub chains: Vec<ChainRound>,
    /// Cumulative tokens credited per participant.
    pub revenue: Vec<f64>,
    /// Cumulative realized value: tokens times `ω·B_k` of the chain paid on.
    pub value: Vec<f64>,
    /// Cumulative expected value from the utility function.
    pub expected: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub round: u64,
    pub chain: usize,
    pub participant: Option<usize>,
    pub check: &'static str,
    pub detail: String,
}

/// A finished run.
#[derive(Clone, Debug)]
pub struct SimRun {
    pub name: String,
    pub mode: Mode,
    pub seed: u64,
    pub participants: Vec<Participant>,
    pub keys: Vec<PublicKey>,
    pub reports: Vec<RoundReport>,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RevenueLine {
    pub participant: usize,
    pub realized: f64,
    pub expected: f64,
    pub relative_gap: f64,
}

/// Realized against expected value per participant at the end of `reports`.
pub fn revenue_report(reports: &[RoundReport]) -> Vec<RevenueLine> {
    let Some(last) = reports.last() else {
        return Vec::new();
    };
    last.value
        .iter()
        .zip(&last.expected)
        .enumerate()
        .map(|(i, (&realized, &expected))| RevenueLine {
            participant: i,
            realized,
            expected,
            relative_gap: if expected == 0.0 {
                if realized == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                (realized - expected) / expected
            },
        })
        .collect()
}

impl SimRun {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn chains(&self) -> usize {
        self.reports.first().map_or(0, |r| r.chains.len())
    }

    /// Fraction of active rounds in which participant `i` led chain `k`.
    pub fn leader_frequency(&self, i: usize, k: usize) -> f64 {
        let mut active = 0u64;
        let mut led = 0u64;
        for r in &self.reports {
            let c = &r.chains[k - 1];
            if c.active {
                active += 1;
                led += c.leaders.iter().filter(|&&l| l == i).count() as u64;
            }
        }
        if active == 0 {
            0.0
        } else {
            led as f64 / active as f64
        }
    }

    /// One row per round: leaders, chain weight and market weight of every
    /// chain, then each participant's cumulative revenue.
    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["round".to_string()];
        for k in 1..=self.chains() {
            header.push(format!("leaders_{k}"));
            header.push(format!("chain_weight_{k}"));
            header.push(format!("market_weight_{k}"));
        }
        for p in &self.participants {
            header.push(format!("revenue_{}", p.name));
        }
        out.write_record(&header)?;
        for r in &self.reports {
            let mut row = vec![r.round.to_string()];
            for c in &r.chains {
                row.push(
                    c.leaders
                        .iter()
                        .map(|&l| self.keys[l].to_string())
                        .collect::<Vec<_>>()
                        .join(";"),
                );
                row.push(c.chain_weight.to_string());
                row.push(c.market_weight.to_string());
            }
            row.extend(r.revenue.iter().map(f64::to_string));
            out.write_record(&row)?;
        }
        out.flush()
    }

    pub fn summary(&self) -> Summary {
        let last = self.reports.last();
        let revenue = revenue_report(&self.reports);
        let participants = self
            .participants
            .iter()
            .enumerate()
            .map(|(i, p)| ParticipantSummary {
                name: p.name.clone(),
                pk: self.keys[i].to_string(),
                capacity: p.capacity,
                strategy: serde_json::to_value(&p.strategy).expect("strategy serializes"),
                revenue: last.map_or(0.0, |r| r.revenue[i]),
                realized_value: revenue[i].realized,
                expected_value: revenue[i].expected,
                relative_gap: revenue[i].relative_gap,
                leader_frequency: (1..=self.chains()).map(|k| self.leader_frequency(i, k)).collect(),
            })
            .collect();
        let chains = last
            .map(|r| {
                r.chains
                    .iter()
                    .map(|c| ChainSummary {
                        chain: c.chain,
                        final_weight: c.chain_weight,
                        final_market_weight: c.market_weight,
                    })
                    .collect()
            })
            .unwrap_or_default();
        let attacker_share = self
            .participants
            .iter()
            .enumerate()
            .filter_map(|(i, p)| {
                let k = p.strategy.target()?;
                let mut first = None;
                let trajectory = self
                    .reports
                    .iter()
                    .filter(|r| r.chains[k - 1].active)
                    .map(|r| {
                        first.get_or_insert(r.round);
                        r.chains[k - 1].weights[i]
                    })
                    .collect();
                Some(AttackerTrajectory {
                    participant: p.name.clone(),
                    chain: k,
                    first_round: first.unwrap_or(0),
                    share: trajectory,
                })
            })
            .collect();
        Summary {
            scenario: self.name.clone(),
            mode: self.mode,
            seed: self.seed,
            rounds: self.reports.len() as u64,
            invariants_ok: self.ok(),
            violation_count: self.violations.len(),
            violations: self.violations.iter().take(100).cloned().collect(),
            participants,
            chains,
            attacker_share,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ParticipantSummary {
    pub name: String,
    pub pk: String,
    pub capacity: f64,
    pub strategy: serde_json::Value,
    pub revenue: f64,
    pub realized_value: f64,
    pub expected_value: f64,
    pub relative_gap: f64,
    pub leader_frequency: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainSummary {
    pub chain: usize,
    pub final_weight: f64,
    pub final_market_weight: f64,
}

/// Election-weight share of an attacking participant on its target chain,
/// one entry per round from the round the chain is active.
#[derive(Clone, Debug, Serialize)]
pub struct AttackerTrajectory {
    pub participant: String,
    pub chain: usize,
    pub first_round: u64,
    pub share: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub mode: Mode,
    pub seed: u64,
    pub rounds: u64,
    pub invariants_ok: bool,
    pub violation_count: usize,
    /// First 100 violations.
    pub violations: Vec<Violation>,
    pub participants: Vec<ParticipantSummary>,
    pub chains: Vec<ChainSummary>,
    pub attacker_share: Vec<AttackerTrajectory>,
}
