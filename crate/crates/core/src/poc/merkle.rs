use crate::hash::{Digest, FieldHasher};

pub fn leaf_hash(label: &Digest) -> Digest {
    FieldHasher::new("leaf").digest(label).finish()
}

pub fn node_hash(left: &Digest, right: &Digest) -> Digest {
    FieldHasher::new("node").digest(left).digest(right).finish()
}

/// Complete binary Merkle tree over a power-of-two number of leaves, stored
/// as a flat heap: `nodes[0]` is the root, children of `n` are `2n+1` and
/// `2n+2`, leaves occupy the last `leaves` slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MerkleTree {
    nodes: Vec<Digest>,
    leaves: usize,
}

impl MerkleTree {
    /// Panics unless `labels.len()` is a nonzero power of two.
    pub fn build(labels: &[Digest]) -> Self {
        let leaves = labels.len();
        assert!(leaves.is_power_of_two(), "leaf count must be a power of two");
        let mut nodes = vec![Digest::ZERO; 2 * leaves - 1];
        let first_leaf = leaves - 1;
        for (slot, label) in nodes[first_leaf..].iter_mut().zip(labels) {
            *slot = leaf_hash(label);
        }
        for n in (0..first_leaf).rev() {
            nodes[n] = node_hash(&nodes[2 * n + 1], &nodes[2 * n + 2]);
        }
        MerkleTree { nodes, leaves }
    }

    pub fn root(&self) -> Digest {
        self.nodes[0]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves
    }

    /// Sibling hashes from the leaf up to (excluding) the root.
    pub fn path(&self, index: usize) -> Vec<Digest> {
        assert!(index < self.leaves);
        let mut n = self.leaves - 1 + index;
        let mut out = Vec::with_capacity(self.leaves.trailing_zeros() as usize);
        while n > 0 {
            let sibling = if n % 2 == 1 { n + 1 } else { n - 1 };
            out.push(self.nodes[sibling]);
            n = (n - 1) / 2;
        }
        out
    }
}

/// Recomputes the root from a label, its leaf position and sibling path.
/// `None` if the path length does not match a tree of `leaves` leaves.
pub fn root_from_path(label: &Digest, index: u64, path: &[Digest], leaves: u64) -> Option<Digest> {
    if !leaves.is_power_of_two() || index >= leaves {
        return None;
    }
    if path.len() != leaves.trailing_zeros() as usize {
        return None;
    }
    let mut acc = leaf_hash(label);
    let mut pos = index;
    for sibling in path {
        acc = if pos % 2 == 0 {
            node_hash(&acc, sibling)
        } else {
            node_hash(sibling, &acc)
        };
        pos /= 2;
    }
    Some(acc)
}
