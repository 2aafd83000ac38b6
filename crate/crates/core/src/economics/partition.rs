use serde::{Deserialize, Serialize};

/// Storage split `s = (s₀, s₁, …, s_M)`: `s₀` backs the shared proof and
/// `s_k` the proof dedicated to chain `k`. The capacity is `Σ s_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    s: Vec<f64>,
}

impl Partition {
    /// Panics on an empty vector or a negative / non-finite entry.
    pub fn new(s: Vec<f64>) -> Self {
        assert!(!s.is_empty(), "partition needs the shared slot");
        assert!(
            s.iter().all(|x| x.is_finite() && *x >= 0.0),
            "partition entries must be finite and nonnegative: {s:?}"
        );
        Partition { s }
    }

    pub fn from_sizes(sizes: &[u64]) -> Self {
        Partition::new(sizes.iter().map(|&x| x as f64).collect())
    }

    pub fn shared(&self) -> f64 {
        self.s[0]
    }

    /// `s_k`; zero for a chain outside the partition.
    pub fn chain(&self, k: usize) -> f64 {
        self.s.get(k).copied().unwrap_or(0.0)
    }

    /// Number of chain slots `M`.
    pub fn chains(&self) -> usize {
        self.s.len() - 1
    }

    pub fn slots(&self) -> &[f64] {
        &self.s
    }

    pub(crate) fn slots_mut(&mut self) -> &mut [f64] {
        &mut self.s
    }

    pub fn capacity(&self) -> f64 {
        self.s.iter().sum()
    }

    /// Membership in `𝒟_c`: entries nonnegative and summing to `c` within
    /// `1e-9` relative.
    pub fn is_admissible(&self, c: f64) -> bool {
        (self.capacity() - c).abs() <= 1e-9 * c.abs().max(f64::MIN_POSITIVE)
    }

    /// Elementwise `s / c`.
    pub fn normalized(&self) -> Vec<f64> {
        let c = self.capacity();
        self.s.iter().map(|x| x / c).collect()
    }

    pub fn max_abs_diff(&self, other: &Partition) -> f64 {
        self.s
            .iter()
            .zip(&other.s)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
