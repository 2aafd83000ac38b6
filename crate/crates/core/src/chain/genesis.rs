use crate::hash::FieldHasher;
use crate::keys::KeyPair;
use crate::multichain::ResourceCommitment;
use crate::params::ProtocolParams;
use crate::poc::{self, expand_challenge};

use super::{block_log_weight, Block};

const GENESIS_SEED: u64 = u64::MAX;

/// Key that signs the start-up blocks of `chain`.
pub fn genesis_keys(chain: u32) -> KeyPair {
    KeyPair::derive(GENESIS_SEED, chain as u64)
}

/// The `Δ` deterministic start-up blocks of `chain` (heights `0..Δ`).
///
/// Their proofs open a graph of `genesis_space` nodes under the genesis
/// key's slot nonce, so challenge derivation is defined from height `Δ`.
pub fn genesis_blocks(chain: u32, params: &ProtocolParams) -> Vec<Block> {
    let keys = genesis_keys(chain);
    let mut sizes = vec![0u64; chain as usize + 1];
    sizes[chain as usize] = params.genesis_space;
    let (commitment, secrets) =
        ResourceCommitment::create(&keys, &sizes, params.degree).expect("genesis parameters are valid");
    let state = secrets[chain as usize].as_ref().expect("genesis slot is nonzero");
    let mut prev_hash = FieldHasher::new("genesis-root").u64(chain as u64).finish();
    let mut blocks = Vec::with_capacity(params.window as usize);
    for height in 0..params.window.max(1) {
        let seed = FieldHasher::new("genesis").u64(chain as u64).u64(height).finish();
        let challenge = expand_challenge(&seed, params.genesis_space, params.challenge_count);
        let proof = poc::open(state, &challenge).expect("challenge in range");
        let log_weight = block_log_weight(&proof, params.genesis_space as f64);
        let mut block = Block {
            chain,
            height,
            miner: keys.public(),
            records: Vec::new(),
            prev_hash,
            proof,
            shared_proof: None,
            log_weight,
            commitment: commitment.clone(),
            signature: crate::keys::Signature(crate::hash::Digest::ZERO),
        };
        block.seal(&keys);
        prev_hash = block.hash();
        blocks.push(block);
    }
    blocks
}
