//! Vacuum-field-induced state mixing in hydrogen-like emitters.
//!
//! The crate builds the chain Bloch-Redfield tensor -> geometric-mean
//! Lindblad generator -> effective non-Hermitian Hamiltonian for an atom
//! coupled to a structured electromagnetic vacuum described by its
//! spectral density, and checks it against an exact atom + lossy-mode model.

pub mod atom;
pub mod bath;
pub mod cli;
pub mod dynamics;
pub mod effective;
pub mod error;
pub mod linalg;
pub mod master_eq;
pub mod oracle;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
