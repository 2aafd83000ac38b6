use super::*;
use crate::hash::FieldHasher;
use crate::keys::Certifier;
use crate::params::ProtocolParams;
use crate::poc::{self, expand_challenge, Challenge, SecretState};

fn params() -> ProtocolParams {
    ProtocolParams {
        challenge_count: 8,
        ..ProtocolParams::default()
    }
}

struct Miner {
    keys: KeyPair,
    com: ResourceCommitment,
    state: SecretState,
}

fn miner(seed: u64, size: u64) -> Miner {
    let keys = KeyPair::derive(seed, 0);
    let (com, mut secrets) = ResourceCommitment::create(&keys, &[0, size], 4).unwrap();
    let state = secrets[1].take().unwrap();
    Miner { keys, com, state }
}

fn setup(m: &Miner) -> (ChainView, Certifier) {
    let mut cert = Certifier::new();
    cert.enroll(&m.keys);
    (ChainView::new(1, genesis_blocks(1, &params())).unwrap(), cert)
}

fn build(m: &Miner, view: &ChainView, parent: &Digest, challenge: Option<Challenge>, records: Vec<Vec<u8>>) -> Block {
    let p = params();
    let branch = view.branch(parent).unwrap();
    let height = branch.len() as u64;
    let ch = challenge.unwrap_or_else(|| {
        derive_challenge(&branch, height, p.window, m.state.graph().size, p.challenge_count).unwrap()
    });
    let proof = poc::open(&m.state, &ch).unwrap();
    let mut b = Block {
        chain: 1,
        height,
        miner: m.keys.public(),
        records,
        prev_hash: *parent,
        log_weight: block_log_weight(&proof, m.state.graph().size as f64),
        proof,
        shared_proof: None,
        commitment: m.com.clone(),
        signature: Signature(Digest::ZERO),
    };
    b.seal(&m.keys);
    b
}

#[test]
fn challenge_golden_and_edges() {
    let seed = FieldHasher::new("genesis").u64(1).u64(0).finish();
    assert_eq!(seed.to_hex(), "803320b710c236e88180808cd7589206fd481e35fbb49d2b5b5f94c7e0a19035");
    assert_eq!(expand_challenge(&seed, 16, 5).indices, vec![10, 3, 14, 10, 5]);
    assert_eq!(expand_challenge(&seed, 1000, 1).indices, vec![744]);
    assert!(expand_challenge(&seed, 1, 30).indices.iter().all(|&i| i == 0));

    let g = genesis_blocks(1, &params());
    let branch: Vec<&Block> = g.iter().collect();
    let w = params().window;
    assert_eq!(derive_challenge(&branch, w - 1, w, 16, 3), Err(RejectReason::GenesisWindow));
    let ch = derive_challenge(&branch, w, w, 16, 3).unwrap();
    assert_eq!(ch, expand_challenge(&challenge_seed(&g[0]), 16, 3));
}

#[test]
fn genesis_is_deterministic_and_linked() {
    let a = genesis_blocks(2, &params());
    let b = genesis_blocks(2, &params());
    assert_eq!(a, b);
    assert_eq!(a.len() as u64, params().window);
    for w in a.windows(2) {
        assert_eq!(w[1].prev_hash, w[0].hash());
    }
    assert_ne!(a[0].hash(), genesis_blocks(1, &params())[0].hash());
}

#[test]
fn honest_block_accepted() {
    let m = miner(1, 32);
    let (mut view, cert) = setup(&m);
    let p = params();
    for _ in 0..6 {
        let tip = view.best_tip();
        let b = build(&m, &view, &tip, None, vec![b"tx".to_vec()]);
        assert_eq!(verify_block(&view, &b, &cert, &p), Ok(()));
        view.insert(b).unwrap();
    }
    assert_eq!(fork_choice(&view).len(), p.window as usize + 6);
}

#[test]
fn mutations_rejected() {
    let m = miner(2, 32);
    let (view, cert) = setup(&m);
    let p = params();
    let tip = view.best_tip();
    let good = build(&m, &view, &tip, None, vec![]);
    let reseal = |b: &mut Block| b.seal(&m.keys);

    let check = |b: &Block, want: RejectReason| assert_eq!(verify_block(&view, b, &cert, &p), Err(want), "{want}");

    let mut b = good.clone();
    b.log_weight = (b.weight() * 1.1).ln();
    reseal(&mut b);
    check(&b, RejectReason::WeightMismatch);

    let other = Challenge::new(vec![0; p.challenge_count]);
    let mut b = build(&m, &view, &tip, Some(other), vec![]);
    if b.proof.indices() != good.proof.indices() {
        reseal(&mut b);
        check(&b, RejectReason::ChallengeMismatch);
    }

    let mut b = good.clone();
    b.chain = 2;
    check(&b, RejectReason::WrongChain);

    let mut b = good.clone();
    b.prev_hash = Digest([7; 32]);
    check(&b, RejectReason::UnknownParent);

    let mut b = good.clone();
    b.height += 1;
    check(&b, RejectReason::HeightMismatch);

    let mut b = good.clone();
    b.records.push(b"injected".to_vec());
    check(&b, RejectReason::BadSignature);

    let mut b = good.clone();
    b.records = vec![vec![]; p.max_records + 1];
    reseal(&mut b);
    check(&b, RejectReason::BadRecords);

    let mut b = good.clone();
    b.signature = Signature(Digest([1; 32]));
    check(&b, RejectReason::BadSignature);

    let intruder = KeyPair::derive(99, 0);
    let mut cert2 = cert.clone();
    cert2.enroll(&intruder);
    let mut b = good.clone();
    b.miner = intruder.public();
    b.seal(&intruder);
    assert_eq!(verify_block(&view, &b, &cert2, &p), Err(RejectReason::BadPkBinding));

    let mut b = good.clone();
    b.proof.openings[0].label.0[0] ^= 1;
    b.log_weight = block_log_weight(&b.proof, 32.0);
    reseal(&mut b);
    check(&b, RejectReason::BadChainProof);

    let mut b = good.clone();
    b.proof.openings[0].path[0].0[3] ^= 0x10;
    b.log_weight = block_log_weight(&b.proof, 32.0);
    reseal(&mut b);
    check(&b, RejectReason::BadChainProof);

    assert_eq!(verify_block(&view, &good, &cert, &p), Ok(()));
}

fn child(view: &ChainView, parent: &Digest, log_weight: f64, tag: u8) -> Block {
    let p = view.get(parent).unwrap().clone();
    Block {
        height: p.height + 1,
        prev_hash: *parent,
        records: vec![vec![tag]],
        log_weight,
        ..p
    }
}

#[test]
fn heaviest_branch_wins_not_longest() {
    let mut view = ChainView::new(1, genesis_blocks(1, &params())).unwrap();
    let root = view.best_tip();
    let heavy = view.insert(child(&view, &root, (0.9f64).ln(), 1)).unwrap();
    let mut light = root;
    for t in 0..2 {
        light = view.insert(child(&view, &light, (0.3f64).ln(), 10 + t)).unwrap();
    }
    assert_eq!(view.tips().len(), 2);
    assert_eq!(view.best_tip(), heavy);
    light = view.insert(child(&view, &light, (0.4f64).ln(), 20)).unwrap();
    assert_eq!(view.best_tip(), light);
    let total = view.branch_weight(&light).unwrap();
    assert!((total - (chain_weight(view.branch(&root).unwrap()) + 1.0)).abs() < 1e-12);
}

#[test]
fn ties_go_to_smaller_hash_for_any_insertion_order() {
    let base = ChainView::new(1, genesis_blocks(1, &params())).unwrap();
    let root = base.best_tip();
    let kids: Vec<Block> = (0..5).map(|t| child(&base, &root, (0.5f64).ln(), t)).collect();
    let smallest = kids.iter().map(Block::hash).min().unwrap();
    for perm in [[0, 1, 2, 3, 4], [4, 3, 2, 1, 0], [2, 0, 4, 1, 3]] {
        let mut v = base.clone();
        for i in perm {
            v.insert(kids[i].clone()).unwrap();
        }
        assert_eq!(v.best_tip(), smallest);
    }
}

#[test]
fn view_insert_rules() {
    let mut view = ChainView::new(1, genesis_blocks(1, &params())).unwrap();
    let root = view.best_tip();
    let b = child(&view, &root, -1.0, 0);
    let h = view.insert(b.clone()).unwrap();
    let n = view.len();
    assert_eq!(view.insert(b.clone()).unwrap(), h);
    assert_eq!(view.len(), n);

    let mut orphan = b.clone();
    orphan.prev_hash = Digest([3; 32]);
    assert_eq!(view.insert(orphan), Err(ViewError::UnknownParent(Digest([3; 32]))));
    let mut skip = child(&view, &h, -1.0, 1);
    skip.height += 1;
    assert!(matches!(view.insert(skip), Err(ViewError::Height { .. })));
    let mut other = child(&view, &h, -1.0, 2);
    other.chain = 3;
    assert!(matches!(view.insert(other), Err(ViewError::WrongChain { .. })));
}

#[test]
fn prune_drops_dead_forks_only() {
    let mut view = ChainView::new(1, genesis_blocks(1, &params())).unwrap();
    let root = view.best_tip();
    let dead = view.insert(child(&view, &root, (0.1f64).ln(), 0)).unwrap();
    let mut tip = root;
    for t in 1..5 {
        tip = view.insert(child(&view, &tip, (0.5f64).ln(), t)).unwrap();
    }
    let height = view.get(&tip).unwrap().height;
    let before = fork_choice(&view).iter().map(|b| b.hash()).collect::<Vec<_>>();
    view.prune_forks(&tip, height - 1);
    assert!(!view.contains(&dead));
    assert_eq!(view.tips().iter().copied().collect::<Vec<_>>(), vec![tip]);
    assert_eq!(fork_choice(&view).iter().map(|b| b.hash()).collect::<Vec<_>>(), before);
}

#[test]
fn chain_weight_of_identical_blocks() {
    let g = genesis_blocks(1, &params());
    let b = g[0].clone();
    let n = 1000;
    let branch = vec![b.clone(); n];
    assert!((chain_weight(&branch) - n as f64 * b.weight()).abs() < 1e-9);
    assert_eq!(chain_weight(std::iter::empty::<&Block>()), 0.0);
}

#[test]
fn json_lines_round_trip() {
    let view = ChainView::new(1, genesis_blocks(1, &params())).unwrap();
    let mut buf = Vec::new();
    view.write_json_lines(&mut buf).unwrap();
    let blocks: Vec<Block> = String::from_utf8(buf)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(blocks, genesis_blocks(1, &params()));
}
