use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::{Args, Subcommand};
use multispace_core::hash::Digest;
use multispace_core::poc::{self, expand_challenge, read_fixture, write_fixture, Challenge, FixtureError, OpeningProof};
use serde_json::json;

use crate::{print_json, Failure, Outcome};

#[derive(Subcommand)]
pub enum PocCommand {
    /// Label a graph and write the fixture; prints the commitment.
    Init {
        /// Graph size S, a power of two.
        #[arg(long)]
        size: u64,
        #[arg(long, default_value_t = 4)]
        degree: u32,
        #[arg(long, default_value = "multispace")]
        nonce: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer a challenge from a fixture; prints the proof.
    Open {
        #[arg(long)]
        fixture: PathBuf,
        #[command(flatten)]
        challenge: ChallengeArgs,
        /// Write the proof here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a fixture's labels and root, then verify a proof against it
    /// (an honest opening when no proof is given).
    Verify {
        #[arg(long)]
        fixture: PathBuf,
        #[arg(long)]
        proof: Option<PathBuf>,
        #[command(flatten)]
        challenge: ChallengeArgs,
    },
}

#[derive(Args)]
pub struct ChallengeArgs {
    /// Explicit indices, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "seed")]
    indices: Option<Vec<u64>>,
    /// Hex seed digest to expand.
    #[arg(long)]
    seed: Option<String>,
    /// Number of indices expanded from the seed.
    #[arg(long, default_value_t = 30)]
    count: usize,
}

impl ChallengeArgs {
    fn challenge(&self, size: u64) -> Result<Challenge, Failure> {
        if let Some(ix) = &self.indices {
            return Ok(Challenge::new(ix.clone()));
        }
        let seed = match &self.seed {
            Some(h) => Digest::from_hex(h).map_err(|e| Failure::usage(anyhow!("bad --seed: {e}")))?,
            None => Digest::ZERO,
        };
        Ok(expand_challenge(&seed, size, self.count))
    }
}

fn load(path: &PathBuf) -> Result<(poc::SpaceCommitment, poc::SecretState), Failure> {
    let file = File::open(path)
        .with_context(|| format!("opening {}", path.display()))
        .map_err(Failure::usage)?;
    read_fixture(BufReader::new(file)).map_err(|e| match e {
        FixtureError::Io(_) => Failure::usage(e),
        other => Failure::check(anyhow!("{}: {other}", path.display())),
    })
}

pub fn run(cmd: PocCommand) -> Outcome {
    match cmd {
        PocCommand::Init {
            size,
            degree,
            nonce,
            out,
        } => {
            let (com, state) = poc::init(size, nonce.as_bytes(), degree).map_err(Failure::usage)?;
            let file = File::create(&out)
                .with_context(|| format!("creating {}", out.display()))
                .map_err(Failure::usage)?;
            write_fixture(BufWriter::new(file), &state).map_err(Failure::usage)?;
            log::info!("wrote {} ({} labels)", out.display(), size);
            print_json(&com)
        }
        PocCommand::Open { fixture, challenge, out } => {
            let (com, state) = load(&fixture)?;
            let ch = challenge.challenge(com.size)?;
            let proof = poc::open(&state, &ch).map_err(Failure::usage)?;
            match out {
                Some(path) => {
                    let file = File::create(&path)
                        .with_context(|| format!("creating {}", path.display()))
                        .map_err(Failure::usage)?;
                    serde_json::to_writer(BufWriter::new(file), &proof).map_err(Failure::usage)
                }
                None => print_json(&proof),
            }
        }
        PocCommand::Verify {
            fixture,
            proof,
            challenge,
        } => {
            let (com, state) = load(&fixture)?;
            let ch = challenge.challenge(com.size)?;
            let proof: OpeningProof = match proof {
                Some(path) => {
                    let file = File::open(&path)
                        .with_context(|| format!("opening {}", path.display()))
                        .map_err(Failure::usage)?;
                    serde_json::from_reader(BufReader::new(file))
                        .with_context(|| format!("parsing {}", path.display()))
                        .map_err(Failure::usage)?
                }
                None => poc::open(&state, &ch).map_err(Failure::usage)?,
            };
            let verdict = poc::verify(&com, &ch, &proof);
            print_json(&json!({
                "gamma": com.gamma,
                "size": com.size,
                "indices": ch.indices,
                "accepted": verdict.is_ok(),
                "reason": verdict.as_ref().err().map(|e| e.to_string()),
            }))?;
            verdict.map_err(|e| Failure::check(anyhow!("proof rejected: {e}")))
        }
    }
}
