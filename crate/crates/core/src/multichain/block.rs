use thiserror::Error;

use crate::chain::{
    block_log_weight, challenge_seed, fork_choice, Block, ChainView, RejectReason,
};
use crate::chain::{check_chain_proof, check_header};
use crate::economics::Partition;
use crate::hash::Digest;
use crate::keys::{Certifier, KeyPair, Signature};
use crate::params::ProtocolParams;
use crate::poc::{self, expand_challenge, PocError, SecretState};

use super::{effective_space, MarketWeights, RegistryError, RegistryState, ResourceCommitment};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssembleError {
    #[error("no secret state for slot {0}")]
    EmptySlot(usize),
    #[error("effective space on chain {0} is zero")]
    ZeroEffectiveSpace(usize),
    #[error("chain {k} not covered by a commitment over {chains} chains")]
    UnknownChain { k: usize, chains: usize },
    #[error("branch too short to derive a challenge")]
    GenesisWindow,
}

/// A participant's keys, signed resource commitment and per-slot labels.
#[derive(Clone, Debug)]
pub struct MinerState {
    keys: KeyPair,
    commitment: ResourceCommitment,
    secrets: Vec<Option<SecretState>>,
}

impl MinerState {
    /// Labels every nonzero slot of `sizes` (`S₀, S₁, …, S_M`).
    pub fn new(keys: KeyPair, sizes: &[u64], degree: u32) -> Result<Self, PocError> {
        let (commitment, secrets) = ResourceCommitment::create(&keys, sizes, degree)?;
        Ok(MinerState {
            keys,
            commitment,
            secrets,
        })
    }

    pub fn keys(&self) -> &KeyPair {
        &self.keys
    }

    pub fn commitment(&self) -> &ResourceCommitment {
        &self.commitment
    }

    pub fn secret(&self, slot: usize) -> Option<&SecretState> {
        self.secrets.get(slot).and_then(Option::as_ref)
    }

    pub fn partition(&self) -> Partition {
        Partition::from_sizes(&self.commitment.sizes)
    }
}

fn space_of(com: &ResourceCommitment, market: &MarketWeights, cap_slack: f64, k: usize) -> f64 {
    effective_space(&Partition::from_sizes(&com.sizes), market.beta(), cap_slack, k)
}

/// Builds and signs this miner's candidate block extending the best branch
/// of `view`, with openings of `γ_k` and `γ₀` on the challenge seeded by
/// `H(τ)` of the block `Δ` heights back. The declared weight uses the
/// effective space `min(s_k, (1+δ)·β_k·s₀)`.
pub fn assemble_block(
    miner: &MinerState,
    view: &ChainView,
    market: &MarketWeights,
    params: &ProtocolParams,
    records: Vec<Vec<u8>>,
) -> Result<Block, AssembleError> {
    let k = view.chain() as usize;
    let chains = miner.commitment.chains();
    if k == 0 || k > chains || chains != market.len() {
        return Err(AssembleError::UnknownChain { k, chains });
    }
    let chain_secret = miner.secret(k).ok_or(AssembleError::EmptySlot(k))?;
    let shared_secret = miner.secret(0).ok_or(AssembleError::EmptySlot(0))?;
    let space = space_of(&miner.commitment, market, params.cap_slack, k);
    if space <= 0.0 {
        return Err(AssembleError::ZeroEffectiveSpace(k));
    }

    let branch = fork_choice(view);
    let height = branch.len() as u64;
    let source = height
        .checked_sub(params.window)
        .and_then(|h| branch.get(h as usize))
        .ok_or(AssembleError::GenesisWindow)?;
    let seed = challenge_seed(source);
    let open = |state: &SecretState| {
        let ch = expand_challenge(&seed, state.graph().size, params.challenge_count);
        poc::open(state, &ch).expect("expanded challenge is in range")
    };
    let proof = open(chain_secret);
    let shared_proof = open(shared_secret);
    let log_weight = block_log_weight(&proof, space);
    let prev = *branch.last().expect("view has genesis");

    let mut block = Block {
        chain: k as u32,
        height,
        miner: miner.keys.public(),
        records,
        prev_hash: prev.hash(),
        proof,
        shared_proof: Some(shared_proof),
        log_weight,
        commitment: miner.commitment.clone(),
        signature: Signature(Digest::ZERO),
    };
    block.seal(&miner.keys);
    Ok(block)
}

/// Single-chain checks with the weight exponent `1/S̃` from the verifier's
/// own market weights, then the dual-proof and registry steps:
/// the commitment binds the miner's key, no digest of a new commitment is
/// already in `Γ`, the key is not bound to another commitment in `J`,
/// `τ` opens `γ_k` and `τ′` opens `γ₀` on the same seed. On accept the
/// registry absorbs the commitment.
///
/// Registry conflicts are reported before proof failures.
pub fn verify_multichain_block(
    view: &ChainView,
    block: &Block,
    registry: &mut RegistryState,
    market: &MarketWeights,
    certifier: &Certifier,
    params: &ProtocolParams,
) -> Result<(), RejectReason> {
    let k = block.chain as usize;
    if block.commitment.sizes.len() != market.len() + 1 || block.commitment.gammas.len() != block.commitment.sizes.len() {
        return Err(RejectReason::BadPkBinding);
    }
    let space = space_of(&block.commitment, market, params.cap_slack, k);
    let branch = check_header(view, block, certifier, params, space)?;

    registry.check(&block.commitment).map_err(|e| match e {
        RegistryError::GammaReuse => RejectReason::GammaReuse,
        RegistryError::PkConflict | RegistryError::BadSignature => RejectReason::CommitmentConflict,
    })?;

    check_chain_proof(&branch, block, params)?;

    let shared = block.shared_proof.as_ref().ok_or(RejectReason::BadSharedProof)?;
    let slot0 = block.commitment.slot(0).ok_or(RejectReason::BadSharedProof)?;
    let source = branch
        .get((block.height - params.window) as usize)
        .ok_or(RejectReason::GenesisWindow)?;
    let challenge = expand_challenge(&challenge_seed(source), slot0.size, params.challenge_count);
    poc::verify(&slot0, &challenge, shared).map_err(|_| RejectReason::BadSharedProof)?;

    registry
        .insert_checked(&block.commitment)
        .expect("checked above, registry unchanged since");
    Ok(())
}
