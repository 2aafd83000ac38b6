use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hash::LAMBDA;
use crate::multichain::CapRule;

use super::Strategy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Leaders drawn directly with probability proportional to election weight.
    #[default]
    Functionality,
    /// Leaders found by assembling, verifying and fork-choosing real blocks.
    Protocol,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticipantConfig {
    pub name: String,
    pub capacity: f64,
    #[serde(default)]
    pub strategy: Strategy,
    /// Expands into `count` participants named `name-1 … name-count`.
    #[serde(default = "one")]
    pub count: usize,
}

fn one() -> usize {
    1
}

/// A chain that only exists from `launch_round` on and starts from a
/// market-weight floor instead of an established market.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewbornConfig {
    pub chain: usize,
    pub launch_round: u64,
    pub floor: f64,
}

/// Everything a run depends on. Two runs of the same config produce the
/// same report stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub mode: Mode,
    /// Chain count `M`.
    pub chains: usize,
    #[serde(default = "one")]
    pub lsize: usize,
    pub rounds: u64,
    #[serde(default = "default_lambda")]
    pub lambda: u32,
    /// Challenge lag `Δ`.
    #[serde(default = "default_window")]
    pub window: u64,
    /// Cap slack `δ`.
    #[serde(default = "default_slack")]
    pub cap_slack: f64,
    #[serde(default)]
    pub cap_rule: CapRule,
    #[serde(default = "default_unit")]
    pub mu: f64,
    /// Openings per proof `q`.
    #[serde(default = "default_q")]
    pub challenge_count: usize,
    /// Initialization audit size `t`.
    #[serde(default = "default_q")]
    pub audit_count: usize,
    #[serde(default = "default_degree")]
    pub degree: u32,
    #[serde(default = "default_unit")]
    pub reward: f64,
    #[serde(default)]
    pub fee: f64,
    /// Synthetic transactions per block `ℓ`.
    #[serde(default)]
    pub tx_per_round: usize,
    #[serde(default = "default_unit")]
    pub omega: f64,
    /// Market-weight floor `B_min`.
    #[serde(default = "default_unit")]
    pub min_market_weight: f64,
    pub seed: u64,
    pub participants: Vec<ParticipantConfig>,
    #[serde(default)]
    pub newborn: Option<NewbornConfig>,
}

fn default_lambda() -> u32 {
    LAMBDA
}
fn default_window() -> u64 {
    4
}
fn default_slack() -> f64 {
    0.1
}
fn default_unit() -> f64 {
    1.0
}
fn default_q() -> usize {
    30
}
fn default_degree() -> u32 {
    4
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("no bundled scenario named {0:?}")]
    UnknownScenario(String),
}

/// A participant after `count` expansion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Participant {
    pub name: String,
    pub capacity: f64,
    pub strategy: Strategy,
}

const BUNDLED: &[(&str, &str)] = &[
    ("three-miners", include_str!("../../scenarios/three-miners.toml")),
    ("newborn-attack", include_str!("../../scenarios/newborn-attack.toml")),
    ("incentive", include_str!("../../scenarios/incentive.toml")),
    ("protocol", include_str!("../../scenarios/protocol.toml")),
];

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn bundled_names() -> impl Iterator<Item = &'static str> {
        BUNDLED.iter().map(|(n, _)| *n)
    }

    pub fn bundled_source(name: &str) -> Result<&'static str, ConfigError> {
        BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| *t)
            .ok_or_else(|| ConfigError::UnknownScenario(name.to_string()))
    }

    pub fn bundled(name: &str) -> Result<Self, ConfigError> {
        Self::from_toml(Self::bundled_source(name)?)
    }

    pub fn participants(&self) -> Vec<Participant> {
        let mut out = Vec::new();
        for p in &self.participants {
            for j in 1..=p.count {
                let name = if p.count == 1 {
                    p.name.clone()
                } else {
                    format!("{}-{j}", p.name)
                };
                out.push(Participant {
                    name,
                    capacity: p.capacity,
                    strategy: p.strategy.clone(),
                });
            }
        }
        out
    }

    /// Payout per round and chain, `reward + ℓ·fee`.
    pub fn payout(&self) -> f64 {
        self.reward + self.tx_per_round as f64 * self.fee
    }

    pub fn is_active(&self, chain: usize, round: u64) -> bool {
        match &self.newborn {
            Some(nb) if nb.chain == chain => round >= nb.launch_round,
            _ => true,
        }
    }

    pub fn floor(&self, chain: usize) -> f64 {
        match &self.newborn {
            Some(nb) if nb.chain == chain => nb.floor,
            _ => self.min_market_weight,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.chains == 0 {
            return bad("chains must be positive".into());
        }
        if self.lsize == 0 || self.rounds == 0 || self.window == 0 || self.challenge_count == 0 {
            return bad("lsize, rounds, window and challenge_count must be positive".into());
        }
        if self.lambda != LAMBDA {
            return bad(format!("only λ = {LAMBDA} is supported, got {}", self.lambda));
        }
        if !(self.cap_slack >= 0.0) || !(self.mu > 0.0) || !(self.omega > 0.0) {
            return bad("cap_slack must be ≥ 0, mu and omega positive".into());
        }
        if !(self.reward >= 0.0) || !(self.fee >= 0.0) || !(self.min_market_weight > 0.0) {
            return bad("reward, fee must be ≥ 0 and min_market_weight positive".into());
        }
        let people = self.participants();
        if people.is_empty() {
            return bad("no participants".into());
        }
        if self.lsize > people.len() {
            return bad(format!("lsize {} exceeds participant count {}", self.lsize, people.len()));
        }
        let mut names = BTreeSet::new();
        for p in &people {
            if !names.insert(&p.name) {
                return bad(format!("duplicate participant name {:?}", p.name));
            }
            if !(p.capacity > 0.0) || !p.capacity.is_finite() {
                return bad(format!("participant {:?} needs a positive capacity", p.name));
            }
            p.strategy
                .validate(self.chains)
                .map_err(|m| ConfigError::Invalid(format!("participant {:?}: {m}", p.name)))?;
        }
        if let Some(nb) = &self.newborn {
            if nb.chain == 0 || nb.chain > self.chains {
                return bad(format!("newborn chain {} outside 1..={}", nb.chain, self.chains));
            }
            if !(nb.floor > 0.0) {
                return bad("newborn floor must be positive".into());
            }
            if self.chains == 1 && nb.launch_round > 0 {
                return bad("a newborn chain needs another chain active before launch".into());
            }
        }
        if self.mode == Mode::Protocol {
            if self.lsize != 1 {
                return bad("protocol mode elects one leader per chain (lsize = 1)".into());
            }
            if self.newborn.is_some() {
                return bad("protocol mode has no newborn-chain support".into());
            }
            if self.tx_per_round > 1024 {
                return bad("tx_per_round above the block record limit".into());
            }
        }
        Ok(())
    }
}
