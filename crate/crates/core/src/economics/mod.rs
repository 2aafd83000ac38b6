//! Single-participant incentive analysis: utility of a storage split,
//! the closed-form optimum and a numeric oracle for it, the cap-repair
//! transform, and the adversary storage bound.

mod lemmas;
mod optimum;
mod partition;
mod security;
mod theorem1;
mod utility;

pub use lemmas::{lemma1_objective, lemma2_transform};
pub use optimum::{numeric_optimum, optimal_partition};
pub use partition::Partition;
pub use security::{adversary_bound, max_attacker_share, takeover_threshold, BoundError};
pub use theorem1::{compare_optimum, random_instances, InstanceRange, OptimumGap};
pub use utility::{chain_utility, total_utility, UtilityParams};
