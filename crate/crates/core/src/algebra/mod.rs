//! Finite fields, `F_q[t]`, residue rings and coefficient subspaces.

pub mod field;
pub mod poly;
pub mod residue;
pub mod subspace;

pub use field::Field;
pub use poly::{Poly, PolyRing};
pub use residue::ResidueRing;
pub use subspace::Subspace;
