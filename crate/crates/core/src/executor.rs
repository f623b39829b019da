//! Classical execution of one-sparse exponentials through the rotation
//! sequences of the oracle circuit.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::cost::column_query_charge;
use crate::decomposition::{classify_subspace, OneSparseTerm};
use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, HamiltonianTerm};
use crate::integrator::{ClassLayout, ExponentialPlan, Step};
use crate::linalg::{self, mat2_mul, rx, ry, rz, CMatrix, CVector, Mat2};
use crate::oracle::{read_polar, round_time, OracleConfig, QueryLedger};

/// Anything the executor can rotate: a statevector, or a whole operator
/// (rows transform like amplitudes).
pub trait Amplitudes {
    fn dim(&self) -> usize;
    /// Applies `u` to the `(a_m, a_M)` pair.
    fn rotate_pair(&mut self, m: usize, big_m: usize, u: &Mat2);
    fn scale_row(&mut self, x: usize, z: Complex64);
    fn apply_dense(&mut self, u: &CMatrix);
}

impl Amplitudes for CVector {
    fn dim(&self) -> usize {
        self.len()
    }

    fn rotate_pair(&mut self, m: usize, big_m: usize, u: &Mat2) {
        let (a, b) = (self[m], self[big_m]);
        self[m] = u[0][0] * a + u[0][1] * b;
        self[big_m] = u[1][0] * a + u[1][1] * b;
    }

    fn scale_row(&mut self, x: usize, z: Complex64) {
        self[x] *= z;
    }

    fn apply_dense(&mut self, u: &CMatrix) {
        *self = u * &*self;
    }
}

impl Amplitudes for CMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn rotate_pair(&mut self, m: usize, big_m: usize, u: &Mat2) {
        for col in 0..self.ncols() {
            let (a, b) = (self[(m, col)], self[(big_m, col)]);
            self[(m, col)] = u[0][0] * a + u[0][1] * b;
            self[(big_m, col)] = u[1][0] * a + u[1][1] * b;
        }
    }

    fn scale_row(&mut self, x: usize, z: Complex64) {
        for col in 0..self.ncols() {
            self[(x, col)] *= z;
        }
    }

    fn apply_dense(&mut self, u: &CMatrix) {
        *self = u * &*self;
    }
}

/// `(α, φ) = (2ρ̃δt, φ̃)`; a negative `δt` gives a negative angle.
pub fn rotation_angles(rho: f64, phi: f64, dt: f64) -> (f64, f64) {
    (2.0 * rho * dt, phi)
}

/// `R_z(−π/2) R_z(−φ) R_y(2ρδt) R_z(φ) R_z(π/2)`, which equals
/// `exp(−i [[0, ρe^{iφ}], [ρe^{−iφ}, 0]] δt)` on `(a_m, a_M)`.
pub fn two_dim_rotation(rho: f64, phi: f64, dt: f64) -> Mat2 {
    let (alpha, phi) = rotation_angles(rho, phi, dt);
    let mut u = rz(FRAC_PI_2);
    for g in [rz(phi), ry(alpha), rz(-phi), rz(-FRAC_PI_2)] {
        u = mat2_mul(&g, &u);
    }
    u
}

/// Phase picked up by a diagonal element `ρe^{iφ}` (real, so `φ ∈ {0, π}`).
///
/// The sequence `R_z(−φ) R_x(−π/2) R_y(θ) R_x(π/2) R_z(φ)` collapses to
/// `R_z(−θ)` whatever `φ` is, so the sign of the element is carried in `θ`.
pub fn one_dim_phase(rho: f64, phi: f64, dt: f64) -> Complex64 {
    let (theta, _) = rotation_angles(rho * phi.cos(), phi, dt);
    let mut u = rz(phi);
    for g in [rx(FRAC_PI_2), ry(theta), rx(-FRAC_PI_2), rz(-phi)] {
        u = mat2_mul(&g, &u);
    }
    u[1][1]
}

fn apply_with<S: Amplitudes>(
    state: &mut S,
    class: &OneSparseTerm,
    dt: f64,
    mut element: impl FnMut(usize, usize) -> Result<(f64, f64)>,
) -> Result<()> {
    for &(x, y) in class.pairs() {
        let rec = classify_subspace(class, y);
        let (rho, phi) = element(rec.m, rec.big_m)?;
        if rec.one_dim_flag {
            state.scale_row(rec.m, one_dim_phase(rho, phi, dt));
        } else {
            debug_assert!(x == rec.m && y == rec.big_m && rec.dim_flag);
            state.rotate_pair(rec.m, rec.big_m, &two_dim_rotation(rho, phi, dt));
        }
    }
    Ok(())
}

fn charge_exponential(term: &HamiltonianTerm, value_qubits: u32, ledger: &mut QueryLedger) {
    let qubits = term.dim().trailing_zeros() as u64;
    ledger.charge_columns(column_query_charge(qubits));
    // one read of ρ and φ, a second read of φ, and the uncompute of both
    let n2 = value_qubits as u64;
    ledger.charge_values(n2 + n2 / 2 + 3 * n2 / 2);
    ledger.record_exponential();
}

/// `exp(−i H_{α,j}(t_q) δt)` from truncated polar oracle values at mesh index `q`.
pub fn apply_one_sparse_exponential<S: Amplitudes>(
    state: &mut S,
    term: &HamiltonianTerm,
    class: &OneSparseTerm,
    q: u64,
    dt: f64,
    config: &OracleConfig,
    ledger: &mut QueryLedger,
) -> Result<()> {
    if !dt.is_finite() {
        return Err(Error::Contract(format!("non-finite duration {dt}")));
    }
    charge_exponential(term, config.value_qubits, ledger);
    apply_with(state, class, dt, |x, y| read_polar(term, x, y, q, config))
}

/// Same rotations driven by exact element values at an arbitrary time.
pub fn apply_exact_one_sparse_exponential<S: Amplitudes>(
    state: &mut S,
    term: &HamiltonianTerm,
    class: &OneSparseTerm,
    t: f64,
    dt: f64,
) -> Result<()> {
    apply_with(state, class, dt, |x, y| {
        let z = term.element(x, y, t);
        Ok((z.norm(), if z.norm() == 0.0 { 0.0 } else { z.arg() }))
    })
}

/// Where matrix elements come from during execution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementSource {
    /// True elements at the exact evaluation time.
    Exact,
    /// Oracle values: times rounded to the mesh, elements truncated to `n″` bits.
    Discretized(OracleConfig),
}

/// Runs every step of `plan` on `state`.
///
/// Queries are charged in both modes: the exact mode charges the `n″` of
/// `charge_bits`, which lets exact and discretized runs be compared one to one.
pub fn execute_plan<S: Amplitudes>(
    plan: &ExponentialPlan,
    ham: &Hamiltonian,
    layout: &ClassLayout,
    state: &mut S,
    source: ElementSource,
    charge_bits: u32,
    ledger: &mut QueryLedger,
) -> Result<()> {
    if state.dim() != ham.dim() {
        return Err(Error::InvalidInput("state and Hamiltonian dimensions differ".into()));
    }
    let adjoints: Vec<Option<CMatrix>> = ham.terms().iter().map(|t| t.transform().map(linalg::dagger)).collect();
    for step in &plan.steps {
        match *step {
            Step::Transform { term } => {
                let u = ham.terms()[term]
                    .transform()
                    .ok_or_else(|| Error::Contract(format!("term {term} has no transform")))?;
                state.apply_dense(u);
                ledger.charge_transform();
            }
            Step::InverseTransform { term } => {
                let u = adjoints[term]
                    .as_ref()
                    .ok_or_else(|| Error::Contract(format!("term {term} has no transform")))?;
                state.apply_dense(u);
                ledger.charge_transform();
            }
            Step::Exp {
                segment,
                term,
                color,
                time,
                duration,
            } => {
                let h = &ham.terms()[term];
                let class = &layout.classes[term][color];
                match source {
                    ElementSource::Exact => {
                        charge_exponential(h, charge_bits, ledger);
                        apply_exact_one_sparse_exponential(state, h, class, time, duration)?;
                    }
                    ElementSource::Discretized(cfg) => {
                        let seg = plan.segments[segment];
                        let q = round_time(time, (seg.start, seg.end), &cfg)?;
                        apply_one_sparse_exponential(state, h, class, q, duration, &cfg, ledger)?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// The plan's overall unitary.
pub fn plan_unitary(
    plan: &ExponentialPlan,
    ham: &Hamiltonian,
    layout: &ClassLayout,
    source: ElementSource,
    charge_bits: u32,
    ledger: &mut QueryLedger,
) -> Result<CMatrix> {
    let mut u = linalg::identity(ham.dim());
    execute_plan(plan, ham, layout, &mut u, source, charge_bits, ledger)?;
    Ok(u)
}
