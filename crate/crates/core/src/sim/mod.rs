//! Deterministic round-based simulator.
//!
//! Each round every participant splits its capacity by its strategy,
//! gets an election weight `w(s, B, k)` per chain, leaders are chosen, the
//! payout `reward + ℓ·fee` is split among them, and the invariants are
//! checked. In functionality mode leaders are drawn with probability
//! proportional to weight; in protocol mode every miner assembles a real
//! block and fork choice decides.

mod checks;
mod config;
mod functionality;
mod protocol;
mod report;
mod rng;
mod strategy;

pub use config::{ConfigError, Mode, NewbornConfig, Participant, ParticipantConfig, ScenarioConfig};
pub use report::{
    revenue_report, AttackerTrajectory, ChainRound, ChainSummary, ParticipantSummary, RevenueLine, RoundReport, SimRun,
    Summary, Violation,
};
pub use rng::stream;
pub use strategy::Strategy;

use crate::keys::KeyPair;

/// Key of participant `i` under the scenario seed.
pub fn participant_keys(seed: u64, i: usize) -> KeyPair {
    KeyPair::derive(seed, i as u64)
}

pub fn run(cfg: &ScenarioConfig) -> Result<SimRun, ConfigError> {
    cfg.validate()?;
    let participants = cfg.participants();
    let keys: Vec<KeyPair> = (0..participants.len()).map(|i| participant_keys(cfg.seed, i)).collect();
    let (reports, checker) = match cfg.mode {
        Mode::Functionality => functionality::run(cfg, &participants),
        Mode::Protocol => protocol::run(cfg, &participants, &keys)?,
    };
    Ok(SimRun {
        name: cfg.name.clone(),
        mode: cfg.mode,
        seed: cfg.seed,
        participants,
        keys: keys.iter().map(KeyPair::public).collect(),
        reports,
        violations: checker.violations,
    })
}
