//! Multi-chain layer: resource commitments over a shared proof and one
//! proof per chain, effective-space capping, market-weight estimation, the
//! election weight `w(s, B, k)`, the `Γ`/`J` registry and dual-proof block
//! assembly and verification.

mod block;
mod commitment;
mod election;
mod market;
mod registry;

pub use block::{assemble_block, verify_multichain_block, AssembleError, MinerState};
pub use commitment::{empty_slot_gamma, slot_nonce, ResourceCommitment};
pub use election::{capped_space, effective_space, election_weight, election_weight_with, joined_cap, CapRule, ElectionError};
pub use market::{estimate_market_weights, window_weight, MarketError, MarketWeights};
pub use registry::{Registration, RegistryError, RegistryImportError, RegistryState};
