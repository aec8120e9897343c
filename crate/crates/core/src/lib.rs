//! Permutational quantum computing on fixed-excitation subspaces.

pub mod clifford;
pub mod dualrail;
pub mod error;
pub mod feasibility;
pub mod gates;
pub mod induced;
pub mod perm;
pub mod perm_hadamard;
pub mod reports;
pub mod schedule;
pub mod state;
pub mod toffoli;

pub use error::{Error, Result};
