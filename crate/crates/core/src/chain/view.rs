use std::collections::{BTreeSet, HashMap};
use std::io::{self, Write};

use thiserror::Error;

use super::weight::CompensatedSum;
use super::Block;
use crate::hash::Digest;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ViewError {
    #[error("predecessor {0} not in view")]
    UnknownParent(Digest),
    #[error("block height {got} does not extend parent height {parent}")]
    Height { parent: u64, got: u64 },
    #[error("block belongs to chain {got}, view holds chain {expected}")]
    WrongChain { expected: u32, got: u32 },
    #[error("genesis must be non-empty and linked")]
    BadGenesis,
}

#[derive(Clone, Debug)]
struct Entry {
    block: Block,
    parent: Option<Digest>,
    /// Compensated weight sum from genesis through this block.
    total: CompensatedSum,
}

/// Append-only store of verified blocks of one chain.
///
/// Holds the genesis run and every accepted block keyed by hash; `tips`
/// is exactly the set of stored blocks without a stored successor.
#[derive(Clone, Debug)]
pub struct ChainView {
    chain: u32,
    entries: HashMap<Digest, Entry>,
    children: HashMap<Digest, usize>,
    tips: BTreeSet<Digest>,
    genesis: Vec<Digest>,
}

impl ChainView {
    /// Starts a view from a linked run of genesis blocks (heights `0..Δ`).
    pub fn new(chain: u32, genesis: Vec<Block>) -> Result<Self, ViewError> {
        if genesis.is_empty() {
            return Err(ViewError::BadGenesis);
        }
        let mut view = ChainView {
            chain,
            entries: HashMap::new(),
            children: HashMap::new(),
            tips: BTreeSet::new(),
            genesis: Vec::new(),
        };
        let mut prev: Option<Digest> = None;
        let mut total = CompensatedSum::default();
        for (h, block) in genesis.into_iter().enumerate() {
            if block.chain != chain || block.height != h as u64 {
                return Err(ViewError::BadGenesis);
            }
            if let Some(p) = prev {
                if block.prev_hash != p {
                    return Err(ViewError::BadGenesis);
                }
                *view.children.entry(p).or_default() += 1;
            }
            total.add(block.weight());
            let hash = block.hash();
            view.entries.insert(
                hash,
                Entry {
                    block,
                    parent: prev,
                    total,
                },
            );
            view.genesis.push(hash);
            prev = Some(hash);
        }
        view.tips.insert(prev.expect("non-empty genesis"));
        Ok(view)
    }

    pub fn chain(&self) -> u32 {
        self.chain
    }

    pub fn genesis(&self) -> &[Digest] {
        &self.genesis
    }

    pub fn tips(&self) -> &BTreeSet<Digest> {
        &self.tips
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, hash: &Digest) -> Option<&Block> {
        self.entries.get(hash).map(|e| &e.block)
    }

    pub fn contains(&self, hash: &Digest) -> bool {
        self.entries.contains_key(hash)
    }

    /// Adds a block whose parent is present. Re-inserting a stored block is
    /// a no-op.
    pub fn insert(&mut self, block: Block) -> Result<Digest, ViewError> {
        if block.chain != self.chain {
            return Err(ViewError::WrongChain {
                expected: self.chain,
                got: block.chain,
            });
        }
        let hash = block.hash();
        if self.entries.contains_key(&hash) {
            return Ok(hash);
        }
        let parent = self
            .entries
            .get(&block.prev_hash)
            .ok_or(ViewError::UnknownParent(block.prev_hash))?;
        if block.height != parent.block.height + 1 {
            return Err(ViewError::Height {
                parent: parent.block.height,
                got: block.height,
            });
        }
        let total = parent.total.with(block.weight());
        let parent_hash = block.prev_hash;
        self.entries.insert(
            hash,
            Entry {
                block,
                parent: Some(parent_hash),
                total,
            },
        );
        *self.children.entry(parent_hash).or_default() += 1;
        self.tips.remove(&parent_hash);
        self.tips.insert(hash);
        Ok(hash)
    }

    /// Total weight of the branch ending at `tip`.
    pub fn branch_weight(&self, tip: &Digest) -> Option<f64> {
        self.entries.get(tip).map(|e| e.total.value())
    }

    /// Genesis-to-`tip` branch.
    pub fn branch(&self, tip: &Digest) -> Option<Vec<&Block>> {
        let mut out = Vec::new();
        let mut cur = Some(*tip);
        while let Some(h) = cur {
            let e = self.entries.get(&h)?;
            out.push(&e.block);
            cur = e.parent;
        }
        out.reverse();
        Some(out)
    }

    /// Tip of the heaviest branch; ties go to the smaller tip hash.
    pub fn best_tip(&self) -> Digest {
        let mut best: Option<(f64, Digest)> = None;
        for tip in &self.tips {
            let w = self.entries[tip].total.value();
            // tips iterate in ascending hash order, so strict > keeps the smaller hash on ties
            if best.map_or(true, |(bw, _)| w > bw) {
                best = Some((w, *tip));
            }
        }
        best.expect("view always has a tip").1
    }

    /// Drops every block that is neither an ancestor of `keep` nor an
    /// ancestor of some block above height `below`. Keeps memory bounded
    /// once losing forks can no longer win.
    pub fn prune_forks(&mut self, keep: &Digest, below: u64) {
        let starts: Vec<Digest> = std::iter::once(*keep)
            .chain(
                self.entries
                    .iter()
                    .filter(|(_, e)| e.block.height > below)
                    .map(|(h, _)| *h),
            )
            .collect();
        let mut retained = BTreeSet::new();
        for start in starts {
            let mut cur = Some(start);
            while let Some(h) = cur {
                if !retained.insert(h) {
                    break;
                }
                cur = self.entries.get(&h).and_then(|e| e.parent);
            }
        }
        self.entries.retain(|h, _| retained.contains(h));
        self.children.clear();
        for e in self.entries.values() {
            if let Some(p) = e.parent {
                *self.children.entry(p).or_default() += 1;
            }
        }
        self.tips = self
            .entries
            .keys()
            .filter(|h| !self.children.contains_key(*h))
            .copied()
            .collect();
    }

    /// Writes the best branch as JSON lines, one block per line.
    pub fn write_json_lines<W: Write>(&self, mut w: W) -> io::Result<()> {
        let tip = self.best_tip();
        for b in self.branch(&tip).expect("tip stored") {
            serde_json::to_writer(&mut w, b)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Genesis-to-tip branch with the greatest total weight.
pub fn fork_choice(view: &ChainView) -> Vec<&Block> {
    view.branch(&view.best_tip()).expect("tip stored")
}
