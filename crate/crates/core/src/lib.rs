//! Dihedral coinvariants of tensor powers, trace maps on symplectic tree
//! derivations, and the rank-2 target space, computed exactly.

pub mod error;
pub mod exactlin;
pub mod lietrees;
pub mod dihedral;
pub mod symfunc;
pub mod omega2;
pub mod traces;
pub mod registry;
pub mod selftest;

pub use error::{Error, Result};
