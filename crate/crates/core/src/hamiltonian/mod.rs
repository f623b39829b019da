//! Time-dependent Hamiltonians `H(t) = Σ_α T_α† H_α(t) T_α` and their
//! sparsity and smoothness metadata.

pub mod catalog;
pub mod jet;
pub mod scalar;
pub mod smoothness;

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
pub use scalar::{TimeFunction, TrigMode};

/// Residual allowed on Hermiticity and unitarity checks.
pub const MATRIX_TOL: f64 = 1e-12;

/// Union-over-time set of possibly nonzero positions of a matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityPattern {
    dim: usize,
    entries: BTreeSet<(usize, usize)>,
}

impl SparsityPattern {
    pub fn new(dim: usize, entries: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let entries: BTreeSet<_> = entries.into_iter().collect();
        if let Some(&(x, y)) = entries.iter().find(|&&(x, y)| x >= dim || y >= dim) {
            return Err(Error::InvalidInput(format!(
                "pattern entry ({x},{y}) outside a {dim}x{dim} matrix"
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &BTreeSet<(usize, usize)> {
        &self.entries
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.entries.contains(&(x, y))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries.iter().all(|&(x, y)| self.entries.contains(&(y, x)))
    }

    /// Column indices of row `x`, ascending.
    pub fn row(&self, x: usize) -> Vec<usize> {
        self.entries.range((x, 0)..=(x, usize::MAX)).map(|&(_, y)| y).collect()
    }

    /// Maximum number of entries in any row.
    pub fn degree(&self) -> Result<usize> {
        if self.entries.is_empty() {
            return Err(Error::Degenerate("sparsity pattern is empty".into()));
        }
        let mut counts = vec![0usize; self.dim];
        for &(x, _) in &self.entries {
            counts[x] += 1;
        }
        Ok(counts.into_iter().max().unwrap_or(0))
    }

    pub fn union(&self, other: &SparsityPattern) -> SparsityPattern {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().copied());
        SparsityPattern {
            dim: self.dim.max(other.dim),
            entries,
        }
    }

    fn of_matrix(m: &CMatrix) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for x in 0..m.nrows() {
            for y in 0..m.ncols() {
                if m[(x, y)] != Complex64::new(0.0, 0.0) {
                    out.insert((x, y));
                }
            }
        }
        out
    }
}

/// `d`: the largest row occupancy of the term's union pattern.
pub fn sparsity_degree(term: &HamiltonianTerm) -> Result<usize> {
    term.pattern().degree()
}

/// One scalar-weighted constant Hermitian matrix inside a term.
#[derive(Debug, Clone)]
pub struct Component {
    pub coefficient: TimeFunction,
    pub matrix: CMatrix,
}

/// `H_α(t) = Σ_i f_i(t) B_i` with constant Hermitian `B_i`.
#[derive(Debug, Clone)]
pub struct HamiltonianTerm {
    dim: usize,
    components: Vec<Component>,
    component_norms: Vec<f64>,
    pattern: SparsityPattern,
    transform: Option<CMatrix>,
    interval: (f64, f64),
}

impl HamiltonianTerm {
    pub fn new(components: Vec<Component>, transform: Option<CMatrix>, interval: (f64, f64)) -> Result<Self> {
        let dim = components
            .first()
            .map(|c| c.matrix.nrows())
            .ok_or_else(|| Error::Degenerate("a term needs at least one component".into()))?;
        if !(interval.1 > interval.0) {
            return Err(Error::InvalidInput(format!(
                "empty interval [{}, {}]",
                interval.0, interval.1
            )));
        }
        let mut entries = BTreeSet::new();
        for comp in &components {
            let m = &comp.matrix;
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::InvalidInput("component dimensions differ".into()));
            }
            if linalg::hermiticity_residual(m) > MATRIX_TOL * m.norm().max(1.0) {
                return Err(Error::InvalidInput("component matrix is not Hermitian".into()));
            }
            entries.extend(SparsityPattern::of_matrix(m));
        }
        if let Some(t) = &transform {
            if t.nrows() != dim || !linalg::is_unitary(t, MATRIX_TOL) {
                return Err(Error::InvalidInput("basis transform is not unitary".into()));
            }
        }
        // Hermitian components give a symmetric pattern already; close it anyway
        // so entries that vanish to round-off on one side stay paired.
        let mirrored: Vec<_> = entries.iter().map(|&(x, y)| (y, x)).collect();
        entries.extend(mirrored);
        let component_norms = components
            .iter()
            .map(|c| linalg::hermitian_norm_bound(&c.matrix))
            .collect();
        Ok(Self {
            dim,
            components,
            component_norms,
            pattern: SparsityPattern { dim, entries },
            transform,
            interval,
        })
    }

    /// Replaces the pattern by a caller-supplied superset.
    pub fn with_pattern(mut self, pattern: SparsityPattern) -> Result<Self> {
        if !pattern.is_symmetric() {
            return Err(Error::InvalidInput("pattern is not symmetric".into()));
        }
        if !self.pattern.entries.is_subset(&pattern.entries) {
            return Err(Error::InvalidInput("pattern misses nonzero entries".into()));
        }
        self.pattern = pattern;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pattern(&self) -> &SparsityPattern {
        &self.pattern
    }

    pub fn transform(&self) -> Option<&CMatrix> {
        self.transform.as_ref()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// `‖B_i‖` for every component, in order.
    pub fn component_norms(&self) -> &[f64] {
        &self.component_norms
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn evaluate(&self, t: f64) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for comp in &self.components {
            out += &comp.matrix * Complex64::from(comp.coefficient.value(t));
        }
        out
    }

    /// Single matrix element of `H_α(t)`.
    pub fn element(&self, x: usize, y: usize, t: f64) -> Complex64 {
        self.components
            .iter()
            .map(|comp| comp.matrix[(x, y)] * comp.coefficient.value(t))
            .sum()
    }

    /// `H_α^(p)(t)` for `p = 0..=order`, from the analytic coefficient jets.
    pub fn derivatives(&self, t: f64, order: usize) -> Vec<CMatrix> {
        let mut out = vec![CMatrix::zeros(self.dim, self.dim); order + 1];
        for comp in &self.components {
            let d = comp.coefficient.derivatives(t, order);
            for (p, dp) in d.into_iter().enumerate() {
                out[p] += &comp.matrix * Complex64::from(dp);
            }
        }
        out
    }

    /// `‖H_α^(p)(t)‖` for `p = 0..=order`; non-finite where a derivative does not exist.
    pub fn derivative_norms(&self, t: f64, order: usize) -> Vec<f64> {
        if let [comp] = self.components.as_slice() {
            let scale = self.component_norms[0];
            return comp
                .coefficient
                .derivatives(t, order)
                .into_iter()
                .map(|d| d.abs() * scale)
                .collect();
        }
        if self.dim > linalg::EXACT_NORM_MAX_DIM {
            return self.sparse_row_sum_norms(t, order);
        }
        self.derivatives(t, order)
            .iter()
            .map(|m| {
                if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                    linalg::hermitian_norm(m)
                } else {
                    f64::NAN
                }
            })
            .collect()
    }

    /// Largest absolute row sum of every derivative, walking only the pattern.
    fn sparse_row_sum_norms(&self, t: f64, order: usize) -> Vec<f64> {
        let coeffs: Vec<Vec<f64>> = self
            .components
            .iter()
            .map(|c| c.coefficient.derivatives(t, order))
            .collect();
        let mut best = vec![0.0_f64; order + 1];
        let mut row = usize::MAX;
        let mut sums = vec![0.0_f64; order + 1];
        for &(x, y) in &self.pattern.entries {
            if x != row {
                for (b, s) in best.iter_mut().zip(&mut sums) {
                    *b = b.max(*s);
                    *s = 0.0;
                }
                row = x;
            }
            for (p, s) in sums.iter_mut().enumerate() {
                let z: Complex64 = self
                    .components
                    .iter()
                    .zip(&coeffs)
                    .map(|(c, d)| c.matrix[(x, y)] * d[p])
                    .sum();
                *s += z.norm();
            }
        }
        for (b, s) in best.iter_mut().zip(&sums) {
            *b = b.max(*s);
        }
        best
    }

    /// Largest element modulus of `H_α(t)`.
    pub fn max_element(&self, t: f64) -> f64 {
        self.pattern
            .entries
            .iter()
            .map(|&(x, y)| self.element(x, y, t).norm())
            .fold(0.0, f64::max)
    }

    /// Jump times of the coefficients inside the open interval.
    pub fn discontinuities(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .components
            .iter()
            .flat_map(|c| c.coefficient.discontinuities())
            .filter(|&b| b > self.interval.0 && b < self.interval.1)
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

/// Spectral norm of the `p`-th central finite difference of `evaluate`,
/// refined once by Richardson extrapolation. Verification only.
pub fn estimate_derivative_norm(term: &HamiltonianTerm, p: usize, t: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let (a, b) = term.interval;
    let reach = p as f64 * h;
    if t - reach < a || t + reach > b {
        return Err(Error::OutOfInterval { t, start: a, end: b });
    }
    let diff = |h: f64| -> CMatrix {
        let mut acc = CMatrix::zeros(term.dim, term.dim);
        let mut binom = 1.0;
        for j in 0..=p {
            let offset = (p as f64 / 2.0 - j as f64) * h;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += term.evaluate(t + offset) * Complex64::from(sign * binom);
            binom = binom * (p - j) as f64 / (j + 1) as f64;
        }
        acc / Complex64::from(h.powi(p as i32))
    };
    let coarse = diff(h);
    let fine = diff(h / 2.0);
    let refined = (fine * Complex64::from(4.0) - coarse) / Complex64::from(3.0);
    Ok(linalg::spectral_norm(&refined))
}

/// The assembled Hamiltonian `Σ_α T_α† H_α(t) T_α` over a time interval.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    name: String,
    terms: Vec<HamiltonianTerm>,
    interval: (f64, f64),
}

impl Hamiltonian {
    pub fn new(name: impl Into<String>, terms: Vec<HamiltonianTerm>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Degenerate("a Hamiltonian needs at least one term".into()))?;
        let dim = first.dim;
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::InvalidInput(format!("dimension {dim} is not 2^n with n ≥ 1")));
        }
        let interval = first.interval;
        for term in &terms {
            if term.dim != dim {
                return Err(Error::InvalidInput("terms have different dimensions".into()));
            }
            if term.interval != interval {
                return Err(Error::InvalidInput("terms have different intervals".into()));
            }
        }
        Ok(Self {
            name: name.into(),
            terms,
            interval,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn dim(&self) -> usize {
        self.terms[0].dim
    }

    /// Number of qubits `n` with `2^n = dim`.
    pub fn qubits(&self) -> u32 {
        self.dim().trailing_zeros()
    }

    /// `M`: number of terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// `d`: largest sparsity over the terms.
    pub fn sparsity(&self) -> Result<usize> {
        self.terms
            .iter()
            .map(sparsity_degree)
            .try_fold(0, |acc, d| Ok(acc.max(d?)))
    }

    pub fn evaluate(&self, t: f64) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for term in &self.terms {
            let h = term.evaluate(t);
            out += match &term.transform {
                Some(u) => u.adjoint() * h * u,
                None => h,
            };
        }
        out
    }

    /// Interior jump times, sorted.
    pub fn discontinuities(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.terms.iter().flat_map(|t| t.discontinuities()).collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Maximal sub-intervals on which every coefficient is smooth.
    pub fn smooth_pieces(&self) -> Vec<(f64, f64)> {
        let mut cuts = vec![self.interval.0];
        cuts.extend(self.discontinuities());
        cuts.push(self.interval.1);
        cuts.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Checks Hermiticity and pattern containment at `samples` uniform times.
    pub fn validate(&self, samples: usize) -> Result<()> {
        let (a, b) = self.interval;
        for i in 0..samples.max(1) {
            let t = a + (b - a) * (i as f64 + 0.5) / samples.max(1) as f64;
            for (idx, term) in self.terms.iter().enumerate() {
                let h = term.evaluate(t);
                if linalg::hermiticity_residual(&h) > MATRIX_TOL * h.norm().max(1.0) {
                    return Err(Error::InvalidInput(format!("term {idx} not Hermitian at t={t}")));
                }
                for x in 0..h.nrows() {
                    for y in 0..h.ncols() {
                        if h[(x, y)].norm() > 0.0 && !term.pattern.contains(x, y) {
                            return Err(Error::InvalidInput(format!(
                                "term {idx} entry ({x},{y}) nonzero outside its pattern at t={t}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, sigma_x};

    fn linear_x() -> HamiltonianTerm {
        HamiltonianTerm::new(
            vec![Component {
                coefficient: TimeFunction::Linear {
                    slope: 1.0,
                    intercept: 0.0,
                },
                matrix: sigma_x(),
            }],
            None,
            (0.0, 4.0),
        )
        .unwrap()
    }

    #[test]
    fn degree_examples() {
        let diag = SparsityPattern::new(4, (0..4).map(|x| (x, x))).unwrap();
        assert_eq!(diag.degree().unwrap(), 1);
        let full = SparsityPattern::new(2, [(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        assert_eq!(full.degree().unwrap(), 2);
        let mixed = SparsityPattern::new(4, [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (3, 3)]).unwrap();
        assert_eq!(mixed.degree().unwrap(), 2);
        let empty = SparsityPattern::new(4, []).unwrap();
        assert!(matches!(empty.degree(), Err(Error::Degenerate(_))));
    }

    #[test]
    fn finite_difference_examples() {
        let scalar = HamiltonianTerm::new(
            vec![Component {
                coefficient: TimeFunction::Constant(-2.5),
                matrix: crate::linalg::identity(2),
            }],
            None,
            (0.0, 1.0),
        )
        .unwrap();
        let v = estimate_derivative_norm(&scalar, 0, 0.5, 1e-4).unwrap();
        assert!((v - 2.5).abs() < 1e-12);

        let lin = linear_x();
        let v = estimate_derivative_norm(&lin, 1, 2.0, 1e-4).unwrap();
        assert!((v - 1.0).abs() < 1e-6);
        assert!(matches!(
            estimate_derivative_norm(&lin, 2, 3.9999, 1e-3),
            Err(Error::OutOfInterval { .. })
        ));

        let a = 0.2;
        let g = HamiltonianTerm::new(
            vec![Component {
                coefficient: TimeFunction::Gaussian { center: 1.0, width: a },
                matrix: crate::linalg::identity(2),
            }],
            None,
            (0.0, 2.0),
        )
        .unwrap();
        // g''(1) = -2/(a³√π)
        let exact = 2.0 / (a.powi(3) * std::f64::consts::PI.sqrt());
        let v = estimate_derivative_norm(&g, 2, 1.0, 1e-4 * 2.0).unwrap();
        assert!((v - exact).abs() < 1e-4 * exact, "{v} vs {exact}");
    }

    #[test]
    fn large_terms_bound_the_exact_norm() {
        let ham = crate::CatalogEntry::RandomSparse {
            qubits: 7,
            sparsity: 3,
            seed: 2,
        }
        .build()
        .unwrap();
        let term = &ham.terms()[0];
        for t in [0.1, 0.45, 0.9] {
            let bounds = term.derivative_norms(t, 2);
            for (p, m) in term.derivatives(t, 2).iter().enumerate() {
                let exact = linalg::hermitian_norm(m);
                assert!(bounds[p] >= exact * (1.0 - 1e-12));
                assert!(bounds[p] <= exact * 3.0);
            }
        }
    }

    #[test]
    fn pattern_and_transform_validation() {
        let bad = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]);
        assert!(HamiltonianTerm::new(
            vec![Component {
                coefficient: TimeFunction::Constant(1.0),
                matrix: bad
            }],
            None,
            (0.0, 1.0)
        )
        .is_err());
        let not_unitary = sigma_x() * c(2.0, 0.0);
        assert!(HamiltonianTerm::new(
            vec![Component {
                coefficient: TimeFunction::Constant(1.0),
                matrix: sigma_x()
            }],
            Some(not_unitary),
            (0.0, 1.0)
        )
        .is_err());
        let term = linear_x();
        assert_eq!(term.pattern().row(0), vec![1]);
        assert!(term.pattern().is_symmetric());
    }
}
