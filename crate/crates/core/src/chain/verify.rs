use crate::hash::Digest;
use crate::keys::Certifier;
use crate::params::ProtocolParams;
use crate::poc::{self, expand_challenge, Challenge};

use super::{block_log_weight, proof_digest, Block, ChainView, RejectReason};

/// `H(τ)` of the block whose proof seeds later challenges.
pub fn challenge_seed(block: &Block) -> Digest {
    proof_digest(&block.proof)
}

/// Challenge for a block at `height` on `branch` (indexed by height):
/// `H(τ_{height−Δ}) mod S`, expanded to `count` indices when `count > 1`.
pub fn derive_challenge(
    branch: &[&Block],
    height: u64,
    window: u64,
    space: u64,
    count: usize,
) -> Result<Challenge, RejectReason> {
    if height < window {
        return Err(RejectReason::GenesisWindow);
    }
    let source = branch
        .get((height - window) as usize)
        .ok_or(RejectReason::GenesisWindow)?;
    Ok(expand_challenge(&challenge_seed(source), space, count))
}

pub(crate) fn weight_matches(declared: f64, expected: f64, tolerance: f64) -> bool {
    if declared == expected {
        return true;
    }
    if !declared.is_finite() || !expected.is_finite() {
        return false;
    }
    (declared - expected).abs() <= tolerance * expected.abs()
}

/// Checks that do not touch proofs: chain id, declared weight against
/// `weight_space`, record count, parent link, signature and that the
/// carried commitment belongs to the miner. Returns the parent branch.
pub(crate) fn check_header<'v>(
    view: &'v ChainView,
    block: &Block,
    certifier: &Certifier,
    params: &ProtocolParams,
    weight_space: f64,
) -> Result<Vec<&'v Block>, RejectReason> {
    if block.chain != view.chain() {
        return Err(RejectReason::WrongChain);
    }
    let expected = block_log_weight(&block.proof, weight_space);
    if !weight_matches(block.log_weight, expected, params.weight_tolerance) {
        return Err(RejectReason::WeightMismatch);
    }
    if block.records.len() > params.max_records {
        return Err(RejectReason::BadRecords);
    }
    let parent = view.get(&block.prev_hash).ok_or(RejectReason::UnknownParent)?;
    if block.height != parent.height + 1 {
        return Err(RejectReason::HeightMismatch);
    }
    if !certifier.verify(&block.miner, &block.body_bytes(), &block.signature) {
        return Err(RejectReason::BadSignature);
    }
    let com = &block.commitment;
    if com.pk != block.miner || !com.is_well_formed(certifier) || com.chains() < block.chain as usize {
        return Err(RejectReason::BadPkBinding);
    }
    Ok(view.branch(&block.prev_hash).expect("parent stored"))
}

/// Challenge recomputation and the chain-specific opening against `γ_k`.
pub(crate) fn check_chain_proof(branch: &[&Block], block: &Block, params: &ProtocolParams) -> Result<Challenge, RejectReason> {
    let slot = block
        .commitment
        .slot(block.chain as usize)
        .ok_or(RejectReason::BadChainProof)?;
    let challenge = derive_challenge(branch, block.height, params.window, slot.size, params.challenge_count)?;
    if block.proof.indices() != challenge.indices {
        return Err(RejectReason::ChallengeMismatch);
    }
    poc::verify(&slot, &challenge, &block.proof).map_err(|_| RejectReason::BadChainProof)?;
    Ok(challenge)
}

/// Full single-chain verification with the weight exponent `1/weight_space`.
pub fn verify_block_with_space(
    view: &ChainView,
    block: &Block,
    certifier: &Certifier,
    params: &ProtocolParams,
    weight_space: f64,
) -> Result<(), RejectReason> {
    let branch = check_header(view, block, certifier, params, weight_space)?;
    check_chain_proof(&branch, block, params)?;
    Ok(())
}

/// Single-chain verification: the weight exponent is the miner's committed
/// size for this chain.
pub fn verify_block(view: &ChainView, block: &Block, certifier: &Certifier, params: &ProtocolParams) -> Result<(), RejectReason> {
    let space = block.commitment.size(block.chain as usize) as f64;
    verify_block_with_space(view, block, certifier, params, space)
}
