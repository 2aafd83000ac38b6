//! Random registration sequences, including γ replays under other keys,
//! against the registry and against full block verification.

use std::collections::{BTreeMap, BTreeSet};

use multispace_core::chain::genesis_blocks;
use multispace_core::hash::Digest;
use multispace_core::keys::{Certifier, KeyPair, PublicKey, Signature};
use multispace_core::multichain::{
    assemble_block, verify_multichain_block, MarketWeights, MinerState, RegistryState, ResourceCommitment,
};
use multispace_core::params::ProtocolParams;
use multispace_core::chain::{ChainView, RejectReason};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn forged(keys: &KeyPair, gammas: Vec<Digest>) -> ResourceCommitment {
    let mut com = ResourceCommitment {
        pk: keys.public(),
        sizes: vec![1; gammas.len()],
        degree: 4,
        gammas,
        signature: Signature(Digest::ZERO),
    };
    com.signature = keys.sign(&com.body_bytes());
    com
}

/// No γ under two keys, no key under two commitments, and `Γ` is exactly
/// the union of registered γ vectors.
fn sound(reg: &RegistryState) -> bool {
    let mut owners: BTreeMap<Digest, BTreeSet<PublicKey>> = BTreeMap::new();
    let mut pks = BTreeSet::new();
    for com in reg.commitments() {
        if !pks.insert(com.pk) {
            return false;
        }
        for g in &com.gammas {
            owners.entry(*g).or_default().insert(com.pk);
        }
    }
    owners.values().all(|o| o.len() == 1)
        && owners.keys().copied().collect::<BTreeSet<_>>() == reg.gammas().copied().collect()
        && owners.iter().all(|(g, o)| reg.owner_of(g) == o.iter().next())
        && reg.is_consistent()
}

#[test]
fn registry_sequences_stay_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let keys: Vec<KeyPair> = (0..4).map(|i| KeyPair::derive(77, i)).collect();
    let mut cert = Certifier::new();
    for k in &keys {
        cert.enroll(k);
    }
    let pool: Vec<Digest> = (0..12u8).map(|i| Digest([i; 32])).collect();
    for _ in 0..2000 {
        let mut reg = RegistryState::new();
        let mut history: Vec<ResourceCommitment> = Vec::new();
        for _ in 0..rng.gen_range(1..12) {
            let k = keys.choose(&mut rng).unwrap();
            let com = match rng.gen_range(0..4) {
                0 if !history.is_empty() => {
                    // replay someone's γ vector under k
                    forged(k, history.choose(&mut rng).unwrap().gammas.clone())
                }
                1 if !history.is_empty() => history.choose(&mut rng).unwrap().clone(),
                2 => {
                    let mut c = forged(k, pool.choose_multiple(&mut rng, 2).copied().collect());
                    c.signature = Signature(Digest([9; 32]));
                    c
                }
                _ => forged(k, (0..rng.gen_range(1..4)).map(|_| *pool.choose(&mut rng).unwrap()).collect()),
            };
            let before = reg.clone().to_json().unwrap();
            match reg.register_commitment(&com, &cert) {
                Ok(_) => history.push(com),
                Err(_) => assert_eq!(reg.to_json().unwrap(), before, "failed registration mutated state"),
            }
            assert!(sound(&reg));
        }
    }
}

#[test]
fn block_sequences_stay_sound() {
    let params = ProtocolParams {
        challenge_count: 4,
        ..ProtocolParams::default()
    };
    let market = MarketWeights::new(vec![10.0, 10.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let miners: Vec<MinerState> = (0..3)
        .map(|i| MinerState::new(KeyPair::derive(88, i), &[8, 4, 4], 4).unwrap())
        .collect();
    let mut cert = Certifier::new();
    for m in &miners {
        cert.enroll(m.keys());
    }
    for _ in 0..30 {
        let mut view = ChainView::new(1, genesis_blocks(1, &params)).unwrap();
        let mut reg = RegistryState::new();
        for _ in 0..6 {
            let m = miners.choose(&mut rng).unwrap();
            let mut b = assemble_block(m, &view, &market, &params, vec![]).unwrap();
            let replay = rng.gen_bool(0.4);
            if replay {
                let victim = miners.choose(&mut rng).unwrap();
                let mut com = victim.commitment().clone();
                com.pk = m.keys().public();
                com.signature = m.keys().sign(&com.body_bytes());
                b.commitment = com;
                b.seal(m.keys());
            }
            let same = replay && b.commitment == *m.commitment();
            match verify_multichain_block(&view, &b, &mut reg, &market, &cert, &params) {
                Ok(()) => {
                    assert!(!replay || same);
                    view.insert(b).unwrap();
                }
                Err(e) => {
                    assert!(replay && !same, "honest block rejected: {e}");
                    assert!(matches!(e, RejectReason::GammaReuse | RejectReason::CommitmentConflict | RejectReason::BadChainProof | RejectReason::BadSharedProof));
                }
            }
            assert!(sound(&reg));
        }
    }
}
