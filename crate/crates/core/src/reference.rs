//! Ground-truth propagators and error metrics, independent of the product
//! formula code.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::executor::{plan_unitary, ElementSource};
use crate::hamiltonian::Hamiltonian;
use crate::integrator::{ClassLayout, ExponentialPlan, Segment};
use crate::linalg::{self, CMatrix, I};
use crate::oracle::QueryLedger;

/// Default accuracy of [`exact_propagator`].
pub const DEFAULT_TOL: f64 = 1e-12;

/// Errors below this are treated as round-off by [`order_scaling_probe`].
pub const UNDERFLOW: f64 = 1e-14;

fn rk4_step(h: &dyn Fn(f64) -> CMatrix, t: f64, dt: f64, u: &CMatrix) -> CMatrix {
    let f = |t: f64, y: &CMatrix| h(t) * y * (-I);
    let k1 = f(t, u);
    let k2 = f(t + dt / 2.0, &(u + &k1 * Complex64::from(dt / 2.0)));
    let k3 = f(t + dt / 2.0, &(u + &k2 * Complex64::from(dt / 2.0)));
    let k4 = f(t + dt, &(u + &k3 * Complex64::from(dt)));
    u + (k1 + k2 * Complex64::from(2.0) + k3 * Complex64::from(2.0) + k4) * Complex64::from(dt / 6.0)
}

/// `U(b, a)` of `U′ = −iH(t)U` for a smooth `h` on `[a, b]`, by RK4 with
/// step doubling and Richardson extrapolation.
pub fn smooth_propagator(h: &dyn Fn(f64) -> CMatrix, a: f64, b: f64, dim: usize, tol: f64) -> Result<CMatrix> {
    let span = b - a;
    let mut u = linalg::identity(dim);
    let mut t = a;
    let mut dt = span / 16.0;
    let min_dt = span * 1e-13;
    let mut worst: f64 = 0.0;
    while t < b {
        dt = dt.min(b - t);
        let full = rk4_step(h, t, dt, &u);
        let half = rk4_step(h, t, dt / 2.0, &u);
        let half = rk4_step(h, t + dt / 2.0, dt / 2.0, &half);
        let diff = &half - &full;
        let err = diff.norm() / 15.0;
        // per-step targets below round-off can never be met
        let allowed = (tol * dt / span).max(4.0 * f64::EPSILON);
        if err <= allowed || dt <= min_dt {
            if err > allowed {
                worst = worst.max(err * span / dt);
            }
            u = half + diff * Complex64::from(1.0 / 15.0);
            t += dt;
        }
        let factor = if err == 0.0 {
            4.0
        } else {
            (0.9 * (allowed / err).powf(0.2)).clamp(0.1, 4.0)
        };
        dt *= factor;
        if dt < min_dt {
            dt = min_dt;
        }
    }
    if worst > tol {
        return Err(Error::ToleranceUnreachable { achieved: worst, tol });
    }
    Ok(u)
}

/// `U(t_b, t_a)` for the assembled Hamiltonian, integrating each smooth piece
/// separately so jumps are never straddled.
pub fn exact_propagator(ham: &Hamiltonian, ta: f64, tb: f64, tol: f64) -> Result<CMatrix> {
    if !(tb > ta) {
        return Err(Error::InvalidInput(format!(
            "propagator needs t_b > t_a, got [{ta}, {tb}]"
        )));
    }
    let mut cuts = vec![ta];
    cuts.extend(ham.discontinuities().into_iter().filter(|&c| c > ta && c < tb));
    cuts.push(tb);
    let pieces = cuts.len() - 1;
    let mut u = linalg::identity(ham.dim());
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        // Coefficients take their right-hand piece at a jump; stay on the left.
        let left_of_b = b - b.abs().max(1.0) * f64::EPSILON;
        let h = |t: f64| ham.evaluate(t.min(left_of_b));
        u = smooth_propagator(&h, a, b, ham.dim(), tol / pieces as f64)? * u;
    }
    Ok(u)
}

/// Spectral norm of `u − v`.
pub fn operator_error(u: &CMatrix, v: &CMatrix) -> f64 {
    linalg::spectral_norm(&(u - v))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProbeOutcome {
    /// Least-squares slope of `log error` against `log Δt`.
    Slope { slope: f64, points: Vec<(f64, f64)> },
    /// Every error was at round-off level.
    Exact,
}

/// Measures the local order of a single `U_k` segment starting at `t_start`.
///
/// Every `Δt` must satisfy `4k√2(5/3)^{k−1}ΛΔt ≤ 3/2`.
pub fn order_scaling_probe(ham: &Hamiltonian, k: u32, lambda: f64, t_start: f64, dts: &[f64]) -> Result<ProbeOutcome> {
    let layout = ClassLayout::of_hamiltonian(ham)?;
    let regime = 4.0 * k as f64 * 2f64.sqrt() * (5.0_f64 / 3.0).powi(k as i32 - 1) * lambda;
    let mut points = Vec::new();
    for &dt in dts {
        if regime * dt > 1.5 {
            return Err(Error::Domain(format!("Δt={dt} lies outside the small-step regime")));
        }
        let plan = ExponentialPlan::build(vec![Segment::new(t_start, t_start + dt, k)?], &layout);
        let mut ledger = QueryLedger::new();
        let v = plan_unitary(&plan, ham, &layout, ElementSource::Exact, 2, &mut ledger)?;
        let u = exact_propagator(ham, t_start, t_start + dt, UNDERFLOW * 1e-2)?;
        let err = operator_error(&u, &v);
        if err >= UNDERFLOW {
            points.push((dt, err));
        }
    }
    if points.is_empty() {
        return Ok(ProbeOutcome::Exact);
    }
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} usable points above the round-off floor, need 3",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in &points {
        sxy += (x.ln() - mx) * (y.ln() - my);
        sxx += (x.ln() - mx).powi(2);
    }
    Ok(ProbeOutcome::Slope {
        slope: sxy / sxx,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{Component, HamiltonianTerm, TimeFunction};
    use crate::linalg::{c, sigma_x, sigma_z};

    fn single(f: TimeFunction, m: CMatrix) -> Hamiltonian {
        let t = HamiltonianTerm::new(
            vec![Component {
                coefficient: f,
                matrix: m,
            }],
            None,
            (0.0, 2.0),
        )
        .unwrap();
        Hamiltonian::new("test", vec![t]).unwrap()
    }

    #[test]
    fn constant_matches_exponential() {
        let h = single(TimeFunction::Constant(0.8), sigma_x());
        let u = exact_propagator(&h, 0.0, 1.3, 1e-12).unwrap();
        let exact = linalg::hermitian_evolution(&(sigma_x() * c(0.8, 0.0)), 1.3);
        assert!(operator_error(&u, &exact) < 1e-11);
    }

    #[test]
    fn commuting_family_matches_quadrature() {
        let f = TimeFunction::Gaussian {
            center: 1.0,
            width: 0.5,
        };
        let h = single(f, sigma_z());
        let u = exact_propagator(&h, 0.0, 2.0, 1e-12).unwrap();
        // ∫₀² g = erf(2)
        let phase = erf(2.0);
        let exact = linalg::hermitian_evolution(&(sigma_z() * c(phase, 0.0)), 1.0);
        assert!(operator_error(&u, &exact) < 1e-11);
        assert!(linalg::unitarity_residual(&u) < 1e-11);
    }

    /// erf by its Maclaurin series; accurate to ~1e-15 for |x| ≤ 2.
    fn erf(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for n in 1..200 {
            term *= -x * x / n as f64;
            sum += term / (2 * n + 1) as f64;
        }
        2.0 / std::f64::consts::PI.sqrt() * sum
    }

    #[test]
    fn global_phase_counts() {
        let u = linalg::hadamard();
        let theta = 0.4;
        let v = &u * Complex64::from_polar(1.0, theta);
        let expect = (Complex64::from_polar(1.0, theta) - 1.0).norm();
        assert!((operator_error(&u, &v) - expect).abs() < 1e-14);
        assert_eq!(operator_error(&u, &u), 0.0);
    }

    #[test]
    fn time_independent_probe_is_exact() {
        let h = single(TimeFunction::Constant(0.5), sigma_x());
        let out = order_scaling_probe(&h, 1, 0.5, 0.1, &[1e-3, 1e-2, 5e-2]).unwrap();
        assert_eq!(out, ProbeOutcome::Exact);
    }
}
