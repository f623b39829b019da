//! Planning, classical execution, and cost accounting of Lie–Trotter–Suzuki
//! product formulas for time-dependent Hamiltonians.
//!
//! The pipeline is: pick a [`Hamiltonian`], split every term into one-sparse
//! colour classes ([`decomposition`]), choose time steps (constant or
//! [`adaptive`]), lay out the exponentials ([`integrator`]), run them on a
//! statevector through the bit-level [`oracle`] ([`executor`]), and compare
//! against the [`reference`] propagator and the closed-form [`cost`] bounds.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adaptive;
pub mod config;
pub mod cost;
pub mod decomposition;
pub mod error;
pub mod executor;
pub mod hamiltonian;
pub mod integrator;
pub mod linalg;
pub mod oracle;
pub mod reference;
pub mod run;

pub use error::{Error, Result};
pub use hamiltonian::catalog::CatalogEntry;
pub use hamiltonian::smoothness::{SmoothnessProfile, Upsilon};
pub use hamiltonian::{Hamiltonian, HamiltonianTerm, SparsityPattern, TimeFunction};
pub use linalg::{CMatrix, CVector};
