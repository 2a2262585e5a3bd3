//! Resource caps shared by all enumeration-heavy operations.

use serde::{Deserialize, Serialize};

/// Hard ceiling on any finite group the engine will materialize.
pub const HARD_GROUP_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest finite group order that may be saturated.
    pub group_order: u64,
    /// Largest residue enumeration (e.g. `q^deg` translation residues).
    pub enumeration: u64,
    /// Number of candidate automorphisms a refutation search may try.
    pub search_budget: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            group_order: 100_000,
            enumeration: 1 << 20,
            search_budget: 64,
        }
    }
}

impl Caps {
    /// Effective group cap, never above [`HARD_GROUP_CAP`].
    pub fn group_limit(&self) -> u64 {
        self.group_order.min(HARD_GROUP_CAP)
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.search_budget = budget;
        self
    }
}
