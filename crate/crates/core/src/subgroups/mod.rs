//! Finite-index subgroups as preimages under amalgam homomorphisms, their
//! quasi-levels and levels, and the congruence decision.

mod handle;
mod quasilevel;

pub use handle::SubgroupHandle;
pub use quasilevel::{level_in, level_of, QuasiLevel};
