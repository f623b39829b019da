//! Built-in Hamiltonians selectable from configuration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Component, Hamiltonian, HamiltonianTerm, TimeFunction, TrigMode};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "catalog", rename_all = "snake_case")]
pub enum CatalogEntry {
    /// Normalized Gaussian of width `a` centred at 1, times the identity, on `[0, 2]`.
    Gaussian { a: f64 },
    /// `t⁵ sin(1/t) e^{-t}` times the identity on `[0, end]`.
    Singular { end: f64 },
    /// One qubit, `f₁(t)σ_z + H† f₂(t)σ_z H` with `H` the Hadamard, on `[0, 1]`.
    QubitPair,
    /// Random `sparsity`-sparse Hermitian with smooth periodic coefficients on `[0, 1]`.
    RandomSparse { qubits: u32, sparsity: usize, seed: u64 },
    /// One qubit with `jumps` evenly spaced coefficient discontinuities on `[0, 1]`.
    Piecewise { jumps: usize },
}

impl CatalogEntry {
    pub fn build(&self) -> Result<Hamiltonian> {
        match *self {
            CatalogEntry::Gaussian { a } => {
                if !(a > 0.0) {
                    return Err(Error::InvalidInput(format!("gaussian width must be positive, got {a}")));
                }
                scalar("gaussian", TimeFunction::Gaussian { center: 1.0, width: a }, (0.0, 2.0))
            }
            CatalogEntry::Singular { end } => {
                if !(end > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "singular end time must be positive, got {end}"
                    )));
                }
                scalar("singular", TimeFunction::SingularSine, (0.0, end))
            }
            CatalogEntry::QubitPair => qubit_pair(),
            CatalogEntry::RandomSparse { qubits, sparsity, seed } => random_sparse(qubits, sparsity, seed),
            CatalogEntry::Piecewise { jumps } => piecewise(jumps),
        }
    }
}

fn scalar(name: &str, f: TimeFunction, interval: (f64, f64)) -> Result<Hamiltonian> {
    let term = HamiltonianTerm::new(
        vec![Component {
            coefficient: f,
            matrix: linalg::identity(2),
        }],
        None,
        interval,
    )?;
    Hamiltonian::new(name, vec![term])
}

fn trig(offset: f64, amplitude: f64, frequency: f64, phase: f64) -> TimeFunction {
    TimeFunction::Trig {
        offset,
        modes: vec![TrigMode {
            amplitude,
            frequency,
            phase,
        }],
    }
}

fn qubit_pair() -> Result<Hamiltonian> {
    let z = HamiltonianTerm::new(
        vec![Component {
            coefficient: trig(1.0, 0.5, 1.3, 0.2),
            matrix: linalg::sigma_z(),
        }],
        None,
        (0.0, 1.0),
    )?;
    let x = HamiltonianTerm::new(
        vec![Component {
            coefficient: trig(0.7, 0.4, 2.1, 1.0),
            matrix: linalg::sigma_z(),
        }],
        Some(linalg::hadamard()),
        (0.0, 1.0),
    )?;
    Hamiltonian::new("qubit_pair", vec![z, x])
}

fn random_sparse(qubits: u32, sparsity: usize, seed: u64) -> Result<Hamiltonian> {
    if !(1..=8).contains(&qubits) {
        return Err(Error::InvalidInput(format!("qubits must be in 1..=8, got {qubits}")));
    }
    let dim = 1usize << qubits;
    if sparsity == 0 || sparsity > dim {
        return Err(Error::InvalidInput(format!(
            "sparsity must be in 1..={dim}, got {sparsity}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = (0..dim).map(|x| (x, x)).collect();
    for _ in 1..sparsity {
        // A random perfect matching; pairs already present are skipped.
        let mut perm: Vec<usize> = (0..dim).collect();
        for i in (1..dim).rev() {
            let j = rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        for pair in perm.chunks(2) {
            if let [x, y] = *pair {
                let e = (x.min(y), x.max(y));
                if !edges.contains(&e) {
                    edges.push(e);
                }
            }
        }
    }
    let mut components = Vec::new();
    for _ in 0..2 {
        let mut m = CMatrix::zeros(dim, dim);
        for &(x, y) in &edges {
            if x == y {
                m[(x, x)] = c(rng.gen_range(-0.5..0.5), 0.0);
            } else {
                let r = rng.gen_range(0.1..0.5);
                let phi = rng.gen_range(0.0..std::f64::consts::TAU);
                m[(x, y)] = c(r * phi.cos(), r * phi.sin());
                m[(y, x)] = m[(x, y)].conj();
            }
        }
        let coefficient = trig(
            rng.gen_range(0.5..1.0),
            rng.gen_range(0.2..0.5),
            rng.gen_range(0.5..3.0),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        components.push(Component { coefficient, matrix: m });
    }
    let term = HamiltonianTerm::new(components, None, (0.0, 1.0))?;
    Hamiltonian::new(format!("random_sparse_{qubits}q_{sparsity}s_{seed}"), vec![term])
}

fn piecewise(jumps: usize) -> Result<Hamiltonian> {
    let breaks: Vec<f64> = (1..=jumps).map(|l| l as f64 / (jumps + 1) as f64).collect();
    let pieces = |base: f64, step: f64, frequency: f64| -> TimeFunction {
        TimeFunction::Piecewise {
            breaks: breaks.clone(),
            pieces: (0..=jumps)
                .map(|l| {
                    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                    trig(base + sign * step, 0.2, frequency, 0.7 * l as f64)
                })
                .collect(),
        }
    };
    let term = HamiltonianTerm::new(
        vec![
            Component {
                coefficient: pieces(0.8, 0.3, 2.0),
                matrix: linalg::sigma_x(),
            },
            Component {
                coefficient: pieces(0.5, -0.25, 1.5),
                matrix: linalg::sigma_z(),
            },
        ],
        None,
        (0.0, 1.0),
    )?;
    Hamiltonian::new(format!("piecewise_{jumps}"), vec![term])
}
