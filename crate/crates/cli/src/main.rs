//! `multispace`: fixtures, scenario runs and economics checks.
//!
//! Machine-readable results go to stdout or files; diagnostics go to
//! stderr. Exit codes: 0 ok, 1 a check failed, 2 usage or parameter error.

mod econ;
mod poc;
mod sim;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "multispace", version, about = "Multi-chain proof-of-space toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Space-proof fixtures: init, open, verify.
    #[command(subcommand)]
    Poc(poc::PocCommand),
    /// Run a scenario and write CSV, summary JSON and a run manifest.
    Sim(sim::SimArgs),
    /// Optimal partitions, the closed-form check and the adversary bound.
    #[command(subcommand)]
    Econ(econ::EconCommand),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// A verification or invariant check failed.
    Check(anyhow::Error),
    /// Bad arguments, parameters or input files.
    Usage(anyhow::Error),
}

impl Failure {
    pub fn usage(e: impl Into<anyhow::Error>) -> Self {
        Failure::Usage(e.into())
    }

    pub fn check(e: impl Into<anyhow::Error>) -> Self {
        Failure::Check(e.into())
    }
}

pub type Outcome = Result<(), Failure>;

pub fn print_json<T: serde::Serialize>(value: &T) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(Failure::usage)?;
    println!("{text}");
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("MULTISPACE_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Poc(c) => poc::run(c),
        Command::Sim(a) => sim::run(a),
        Command::Econ(c) => econ::run(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(e)) => {
            eprintln!("check failed: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
