//! Shared fixtures for the criterion benches.

use ltsim::config::{Mode, RunConfig};
use ltsim::CatalogEntry;

/// Constant-mode run of a random two-qubit, two-sparse Hamiltonian.
pub fn random_two_qubit(epsilon: f64) -> RunConfig {
    RunConfig {
        catalog: CatalogEntry::RandomSparse {
            qubits: 2,
            sparsity: 2,
            seed: 1,
        },
        mode: Mode::Constant,
        k: 1,
        epsilon,
        t0: None,
        dt: None,
        seed: 1,
        time_bits_override: None,
        value_qubits_override: None,
    }
}

/// Adaptive run on the Gaussian pulse of width `a`.
pub fn gaussian_adaptive(a: f64, epsilon: f64) -> RunConfig {
    RunConfig {
        catalog: CatalogEntry::Gaussian { a },
        mode: Mode::Adaptive,
        k: 2,
        epsilon,
        t0: None,
        dt: None,
        seed: 0,
        time_bits_override: None,
        value_qubits_override: None,
    }
}
