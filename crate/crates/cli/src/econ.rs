use anyhow::anyhow;
use clap::{Subcommand, ValueEnum};
use multispace_core::economics::{
    adversary_bound, compare_optimum, max_attacker_share, random_instances, takeover_threshold, InstanceRange,
    UtilityParams,
};
use multispace_core::multichain::{CapRule, MarketWeights};
use serde_json::json;

use crate::{print_json, Failure, Format, Outcome};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Rule {
    /// `β′ = (B_k + s_k)/(‖B‖ + s_k)`.
    Joined,
    /// `β′ = β`.
    Static,
}

impl From<Rule> for CapRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Joined => CapRule::Joined,
            Rule::Static => CapRule::Static,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Regime {
    /// c ∈ [1, 10], B_k ∈ [1e6, 1e7].
    SmallPlayer,
    /// c ∈ [0.1, 1000], B_k ∈ [1, 1000].
    Broad,
}

#[derive(Subcommand)]
pub enum EconCommand {
    /// Closed-form and numeric optimal partition for one (c, B).
    Opt {
        #[arg(long)]
        c: f64,
        /// Market weights, comma separated.
        #[arg(long = "B", value_delimiter = ',', required = true)]
        b: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = Rule::Joined)]
        rule: Rule,
        #[arg(long, default_value_t = 0.005)]
        resolution: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Closed form against the numeric oracle on random instances; exit 1
    /// if any instance is outside 2 grid steps or 1e-6 relative utility.
    VerifyTheorem1 {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0.005)]
        resolution: f64,
        #[arg(long, value_enum, default_value_t = Rule::Joined)]
        rule: Rule,
        #[arg(long, value_enum, default_value_t = Regime::SmallPlayer)]
        regime: Regime,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Shared storage needed for an α share of one chain.
    Bound {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// Total market weight ‖B‖.
        #[arg(long, default_value_t = 1.0)]
        total: f64,
        /// Honest weight of the attacked chain for the exact threshold;
        /// defaults to half the total.
        #[arg(long)]
        target: Option<f64>,
    },
}

fn market(b: Vec<f64>) -> Result<MarketWeights, Failure> {
    MarketWeights::new(b).map_err(Failure::usage)
}

fn params(delta: f64, rule: Rule) -> UtilityParams {
    UtilityParams {
        cap_slack: delta,
        cap_rule: rule.into(),
        ..UtilityParams::default()
    }
}

pub fn run(cmd: EconCommand) -> Outcome {
    match cmd {
        EconCommand::Opt {
            c,
            b,
            delta,
            rule,
            resolution,
            seed,
        } => {
            if !(c > 0.0) || !(resolution > 0.0 && resolution <= 1.0) || !(delta >= 0.0) {
                return Err(Failure::usage(anyhow!("need c > 0, 0 < resolution ≤ 1, delta ≥ 0")));
            }
            let m = market(b.clone())?;
            let g = compare_optimum(c, &m, &params(delta, rule), resolution, seed);
            print_json(&json!({
                "inputs": {"c": c, "B": b, "delta": delta, "rule": format!("{rule:?}").to_lowercase(), "resolution": resolution},
                "closed_form": g.closed_form.slots(),
                "numeric": g.numeric.slots(),
                "gap": {
                    "distance_steps": g.distance_steps,
                    "closed_utility": g.closed_utility,
                    "numeric_utility": g.numeric_utility,
                    "relative_utility": g.relative_gap,
                },
            }))
        }
        EconCommand::VerifyTheorem1 {
            seed,
            trials,
            resolution,
            rule,
            regime,
            format,
        } => {
            let range = match regime {
                Regime::SmallPlayer => InstanceRange::SMALL_PLAYER,
                Regime::Broad => InstanceRange::BROAD,
            };
            let p = params(0.0, rule);
            let gaps: Vec<_> = random_instances(seed, trials, range)
                .into_iter()
                .enumerate()
                .map(|(i, (c, m))| compare_optimum(c, &m, &p, resolution, i as u64))
                .collect();
            let failed = gaps.iter().filter(|g| !g.within(2.0, 1e-6)).count();
            match format {
                Format::Json => {
                    let max_steps = gaps.iter().map(|g| g.distance_steps).fold(0.0, f64::max);
                    let max_rel = gaps.iter().map(|g| g.relative_gap.abs()).fold(0.0, f64::max);
                    print_json(&json!({
                        "inputs": {"seed": seed, "trials": trials, "resolution": resolution,
                                   "rule": format!("{rule:?}").to_lowercase(), "regime": format!("{regime:?}")},
                        "records": gaps.iter().map(|g| json!({
                            "inputs": {"c": g.c, "B": g.market},
                            "closed_form": g.closed_form.slots(),
                            "numeric": g.numeric.slots(),
                            "gap": {"distance_steps": g.distance_steps, "relative_utility": g.relative_gap},
                        })).collect::<Vec<_>>(),
                        "max_distance_steps": max_steps,
                        "max_relative_gap": max_rel,
                        "failed": failed,
                    }))?;
                }
                Format::Csv => {
                    println!("trial,chains,c,distance_steps,relative_gap,closed_utility,numeric_utility");
                    for (i, g) in gaps.iter().enumerate() {
                        println!(
                            "{i},{},{},{},{},{},{}",
                            g.market.len(),
                            g.c,
                            g.distance_steps,
                            g.relative_gap,
                            g.closed_utility,
                            g.numeric_utility
                        );
                    }
                }
            }
            if failed == 0 {
                Ok(())
            } else {
                Err(Failure::check(anyhow!("{failed} of {trials} instances outside tolerance")))
            }
        }
        EconCommand::Bound {
            alpha,
            delta,
            total,
            target,
        } => {
            if !(total > 0.0) {
                return Err(Failure::usage(anyhow!("--total must be positive")));
            }
            let bound = adversary_bound(alpha, delta, total).map_err(Failure::usage)?;
            let b = target.unwrap_or(total / 2.0);
            let exact = takeover_threshold(alpha, delta, b, total).map_err(Failure::usage)?;
            print_json(&json!({
                "inputs": {"alpha": alpha, "delta": delta, "total": total, "target": b},
                "closed_form": bound,
                "fraction_of_total": bound / total,
                "numeric": {
                    "exact_threshold": exact,
                    "share_at_bound": max_attacker_share(bound, delta, b, total),
                },
                "gap": exact - bound,
            }))
        }
    }
}
