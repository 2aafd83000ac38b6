//! Multi-chain proof-of-space consensus.
//!
//! A participant splits its storage into one shared proof `s₀` and one
//! proof per chain `s₁ … s_M`. Every block carries openings of both the
//! chain proof and the shared proof, and the space that counts toward block
//! weight is capped at `(1+δ)·β_k·s₀`, so re-using the shared proof on a
//! new chain buys no weight without dedicated space behind it.
//!
//! Layout:
//! - [`poc`]: pebbling-graph proof of space (`init`, `open`, `verify`).
//! - [`chain`]: single-chain block rules, block and chain weight, fork choice.
//! - [`multichain`]: resource commitments, effective space, market weights,
//!   election weight and dual-proof block verification.
//! - [`economics`]: utility, the closed-form optimal partition and the
//!   numeric oracle that checks it, adversary storage bounds.
//! - [`sim`]: deterministic round-based simulator.

pub mod hash;
pub mod keys;
pub mod poc;
pub mod params;
pub mod chain;
pub mod multichain;
pub mod economics;
pub mod sim;
