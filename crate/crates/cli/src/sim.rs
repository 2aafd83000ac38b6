use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::Args;
use multispace_core::sim::{self, ScenarioConfig};
use serde::Serialize;
use sha2::{Digest as _, Sha256};

use crate::{Failure, Format, Outcome};

#[derive(Args)]
pub struct SimArgs {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    config: Option<PathBuf>,
    /// Bundled scenario: three-miners, newborn-attack, incentive, protocol.
    #[arg(long)]
    scenario: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the round count.
    #[arg(long)]
    rounds: Option<u64>,
    /// Round stream format: csv, or json lines.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// Provenance of one run.
#[derive(Serialize)]
pub struct RunManifest {
    pub scenario: String,
    /// SHA-256 of the config bytes.
    pub config_digest: String,
    pub config_source: String,
    pub code_version: String,
    pub seed: u64,
    pub rounds: u64,
    pub outputs: Vec<PathBuf>,
    pub invariants_ok: bool,
    pub wall_clock_seconds: f64,
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("creating {}", path.display()))
        .map_err(Failure::usage)
}

pub fn run(args: SimArgs) -> Outcome {
    let start = Instant::now();
    let (text, source) = match (&args.config, &args.scenario) {
        (Some(path), _) => (
            fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(Failure::usage)?,
            path.display().to_string(),
        ),
        (None, Some(name)) => (
            ScenarioConfig::bundled_source(name).map_err(Failure::usage)?.to_string(),
            format!("bundled:{name}"),
        ),
        (None, None) => return Err(Failure::usage(anyhow!("--config or --scenario is required"))),
    };
    let mut cfg = ScenarioConfig::from_toml(&text).map_err(Failure::usage)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(rounds) = args.rounds {
        cfg.rounds = rounds;
    }
    if cfg.name.is_empty() {
        cfg.name = "scenario".into();
    }
    log::info!("running {} ({:?} mode, {} rounds)", cfg.name, cfg.mode, cfg.rounds);
    let result = sim::run(&cfg).map_err(Failure::usage)?;

    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))
        .map_err(Failure::usage)?;
    let rounds_path = args.out.join(match args.format {
        Format::Csv => format!("{}.csv", cfg.name),
        Format::Json => format!("{}.jsonl", cfg.name),
    });
    let mut w = create(&rounds_path)?;
    match args.format {
        Format::Csv => result.write_csv(&mut w).map_err(Failure::usage)?,
        Format::Json => {
            for r in &result.reports {
                serde_json::to_writer(&mut w, r).map_err(Failure::usage)?;
                w.write_all(b"\n").map_err(Failure::usage)?;
            }
        }
    }
    w.flush().map_err(Failure::usage)?;

    let summary = result.summary();
    let summary_path = args.out.join("summary.json");
    let mut w = create(&summary_path)?;
    serde_json::to_writer_pretty(&mut w, &summary).map_err(Failure::usage)?;
    w.flush().map_err(Failure::usage)?;

    let manifest = RunManifest {
        scenario: cfg.name.clone(),
        config_digest: hex::encode(Sha256::digest(text.as_bytes())),
        config_source: source,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        rounds: cfg.rounds,
        outputs: vec![rounds_path, summary_path],
        invariants_ok: result.ok(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    let manifest_path = args.out.join("manifest.json");
    let mut w = create(&manifest_path)?;
    serde_json::to_writer_pretty(&mut w, &manifest).map_err(Failure::usage)?;
    w.flush().map_err(Failure::usage)?;

    if result.ok() {
        Ok(())
    } else {
        let first = &result.violations[0];
        Err(Failure::check(anyhow!(
            "{} invariant violations; first: round {} chain {} {}: {}",
            result.violations.len(),
            first.round,
            first.chain,
            first.check,
            first.detail
        )))
    }
}
