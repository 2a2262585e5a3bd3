//! Exact computations with finite-index subgroups of `SL_2(F_q[t])` and
//! `GL_2(F_q[t])`.

pub mod algebra;
pub mod amalgam;
pub mod autos;
pub mod config;
pub mod error;
pub mod fingroup;
pub mod genuine;
pub mod io;
pub mod matrices;
pub mod oracles;
pub mod subgroups;
pub mod suite;

pub use config::Caps;
pub use error::{Error, Result};
