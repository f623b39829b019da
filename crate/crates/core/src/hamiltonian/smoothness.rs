//! Pointwise smoothness `Υ(t)`, its uniform bound `Λ`, and the growth
//! constant `K` that the adaptive scheduler relies on.

use std::fmt;
use std::sync::Arc;

use super::{Hamiltonian, HamiltonianTerm};
use crate::error::{Error, Result};
use crate::linalg;

/// Safety factor applied to sampled maxima when declaring bounds.
pub const DECLARATION_MARGIN: f64 = 1.05;

/// Relative slack on `|Υ′| ≤ K²Υ²` when the derivative is estimated numerically.
pub const GROWTH_CHECK_SLACK: f64 = 1e-6;

fn derivative_sums(terms: &[HamiltonianTerm], order: usize, t: f64) -> Result<Vec<f64>> {
    let mut sums = vec![0.0; order + 1];
    for term in terms {
        for (p, v) in term.derivative_norms(t, order).into_iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InsufficientSmoothness(format!(
                    "derivative of order {p} is not finite at t={t}"
                )));
            }
            sums[p] += v;
        }
    }
    Ok(sums)
}

/// Smallest admissible `Υ(t)`: `max_p (Σ_j ‖H_j^(p)(t)‖)^{1/(p+1)}` over `p ≤ order`.
pub fn upsilon_floor(terms: &[HamiltonianTerm], order: usize, t: f64) -> Result<f64> {
    let sums = derivative_sums(terms, order, t)?;
    Ok(sums
        .iter()
        .enumerate()
        .map(|(p, s)| s.powf(1.0 / (p + 1) as f64))
        .fold(0.0, f64::max))
}

/// Time derivative of [`upsilon_floor`], analytic for single-component terms.
///
/// At a point where two orders tie the larger one-sided slope is returned.
pub fn upsilon_floor_slope(terms: &[HamiltonianTerm], order: usize, t: f64) -> Result<f64> {
    let sums = derivative_sums(terms, order, t)?;
    let mut slopes = vec![0.0; order + 1];
    for term in terms {
        if let [comp] = term.components() {
            let scale = term.component_norms()[0];
            let d = comp.coefficient.derivatives(t, order + 1);
            for p in 0..=order {
                let s = if d[p] == 0.0 {
                    d[p + 1].abs()
                } else {
                    d[p].signum() * d[p + 1]
                };
                slopes[p] += s * scale;
            }
        } else {
            let (a, b) = term.interval();
            let h = 1e-6 * (b - a);
            let hi = term.derivative_norms(t + h, order);
            let lo = term.derivative_norms(t - h, order);
            for p in 0..=order {
                slopes[p] += (hi[p] - lo[p]) / (2.0 * h);
            }
        }
    }
    let values: Vec<f64> = sums
        .iter()
        .enumerate()
        .map(|(p, s)| s.powf(1.0 / (p + 1) as f64))
        .collect();
    let top = values.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0.0);
    }
    let mut best: f64 = 0.0;
    for p in 0..=order {
        if values[p] < top * (1.0 - 1e-12) || sums[p] == 0.0 {
            continue;
        }
        let e = 1.0 / (p + 1) as f64;
        let slope = e * sums[p].powf(e - 1.0) * slopes[p];
        if slope.abs() > best.abs() {
            best = slope;
        }
    }
    Ok(best)
}

/// Piecewise-linear minorant `h ≤ 1/Υ_floor` with Lipschitz constant `slope`,
/// turned into the declared `Υ = margin / h`.
///
/// Because `|d(margin/h)/dt| = |h′|·margin/h² ≤ (slope/margin)·Υ²`, the
/// envelope carries its own growth constant `K² = slope/margin`.
#[derive(Debug, Clone)]
pub struct UpsilonEnvelope {
    start: f64,
    end: f64,
    step: f64,
    h: Vec<f64>,
    margin: f64,
    slope: f64,
}

impl UpsilonEnvelope {
    /// Builds the envelope from `floor` samples on a uniform grid over `[start, end]`.
    ///
    /// Non-finite or failed samples count as `Υ = ∞` (the envelope pinches to zero there).
    pub fn from_samples(start: f64, end: f64, floor: &[f64], slope: f64, margin: f64) -> Self {
        assert!(floor.len() >= 2 && end > start && slope > 0.0 && margin >= 1.0);
        let step = (end - start) / (floor.len() - 1) as f64;
        let mut h: Vec<f64> = floor
            .iter()
            .map(|&u| if u.is_finite() { 1.0 / u } else { 0.0 })
            .collect();
        let reach = slope * step;
        for i in 1..h.len() {
            h[i] = h[i].min(h[i - 1] + reach);
        }
        for i in (0..h.len() - 1).rev() {
            h[i] = h[i].min(h[i + 1] + reach);
        }
        Self {
            start,
            end,
            step,
            h,
            margin,
            slope,
        }
    }

    /// Samples `upsilon_floor` of order `order` at `points` uniform times.
    pub fn from_hamiltonian(ham: &Hamiltonian, order: usize, points: usize, slope: f64, margin: f64) -> Self {
        let floor = sample_floor(ham, order, points);
        let (a, b) = ham.interval();
        Self::from_samples(a, b, &floor, slope, margin)
    }

    pub fn growth_constant(&self) -> f64 {
        (self.slope / self.margin).sqrt()
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    fn h_at(&self, t: f64) -> f64 {
        let t = t.clamp(self.start, self.end);
        let x = (t - self.start) / self.step;
        let i = (x.floor() as usize).min(self.h.len() - 2);
        let w = x - i as f64;
        self.h[i] * (1.0 - w) + self.h[i + 1] * w
    }

    pub fn value(&self, t: f64) -> f64 {
        let h = self.h_at(t);
        if h <= 0.0 {
            f64::INFINITY
        } else if h.is_infinite() {
            0.0
        } else {
            self.margin / h
        }
    }

    /// Exact `∫_a^b margin/h(t) dt` for the piecewise-linear `h`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let a = a.clamp(self.start, self.end);
        let b = b.clamp(self.start, self.end);
        if b <= a {
            return 0.0;
        }
        let mut cuts = vec![a];
        let first = ((a - self.start) / self.step).floor() as usize + 1;
        let mut i = first;
        while i < self.h.len() {
            let node = self.start + i as f64 * self.step;
            if node >= b {
                break;
            }
            if node > a {
                cuts.push(node);
            }
            i += 1;
        }
        cuts.push(b);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (h0, h1) = (self.h_at(w[0]), self.h_at(w[1]));
            let len = w[1] - w[0];
            if h0 <= 0.0 || h1 <= 0.0 {
                return f64::INFINITY;
            }
            let rel = (h1 - h0) / h0;
            total += if rel.abs() < 1e-6 {
                // ln(1+x)/x ≈ 1 - x/2 + x²/3
                len / h0 * (1.0 - rel / 2.0 + rel * rel / 3.0)
            } else {
                len * (h1 / h0).ln() / (h1 - h0)
            };
        }
        self.margin * total
    }

    /// Maximum of the envelope over `[a, b]` (attained at a node or an endpoint).
    pub fn max_on(&self, a: f64, b: f64) -> f64 {
        let mut best = self.value(a).max(self.value(b));
        let lo = ((a - self.start) / self.step).ceil().max(0.0) as usize;
        let hi = (((b - self.start) / self.step).floor().max(0.0) as usize).min(self.h.len() - 1);
        for i in lo..=hi {
            let h = self.h[i];
            best = best.max(if h <= 0.0 { f64::INFINITY } else { self.margin / h });
        }
        best
    }
}

fn sample_floor(ham: &Hamiltonian, order: usize, points: usize) -> Vec<f64> {
    let (a, b) = ham.interval();
    (0..points)
        .map(|i| {
            let t = a + (b - a) * i as f64 / (points - 1) as f64;
            upsilon_floor(ham.terms(), order, t).unwrap_or(f64::INFINITY)
        })
        .collect()
}

/// Declared pointwise smoothness `Υ(t)`.
#[derive(Clone)]
pub enum Upsilon {
    Constant(f64),
    Envelope(Arc<UpsilonEnvelope>),
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Upsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Upsilon::Constant(v) => write!(f, "Constant({v})"),
            Upsilon::Envelope(e) => write!(f, "Envelope(slope={})", e.slope),
            Upsilon::Function(_) => write!(f, "Function(..)"),
        }
    }
}

impl Upsilon {
    pub fn function(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Upsilon::Function(Arc::new(f))
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Upsilon::Constant(v) => *v,
            Upsilon::Envelope(e) => e.value(t),
            Upsilon::Function(f) => f(t),
        }
    }

    /// `∫_a^b Υ(t) dt`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match self {
            Upsilon::Constant(v) => v * (b - a),
            Upsilon::Envelope(e) => e.integral(a, b),
            Upsilon::Function(f) => adaptive_simpson(&**f, a, b, 1e-10),
        }
    }

    /// `Ῡ` over `[a, b]`.
    pub fn mean(&self, a: f64, b: f64) -> f64 {
        self.integral(a, b) / (b - a)
    }

    /// Largest value over `[a, b]`; closures are sampled at 2001 points.
    pub fn max_on(&self, a: f64, b: f64) -> f64 {
        match self {
            Upsilon::Constant(v) => *v,
            Upsilon::Envelope(e) => e.max_on(a, b),
            Upsilon::Function(f) => (0..=2000)
                .map(|i| f(a + (b - a) * i as f64 / 2000.0))
                .fold(0.0, f64::max),
        }
    }
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `Λ`, `Υ(t)` and `K` for smoothness order `P = 2k`.
#[derive(Debug, Clone)]
pub struct SmoothnessProfile {
    pub k: u32,
    pub lambda_bound: f64,
    pub upsilon: Upsilon,
    pub growth_constant: f64,
}

impl SmoothnessProfile {
    pub fn order(&self) -> usize {
        2 * self.k as usize
    }

    /// Envelope profile of `ham` at order `2k` with Lipschitz slope `slope` for `1/Υ`.
    pub fn envelope(ham: &Hamiltonian, k: u32, points: usize, slope: f64) -> Self {
        let env = UpsilonEnvelope::from_hamiltonian(ham, 2 * k as usize, points, slope, DECLARATION_MARGIN);
        let (a, b) = ham.interval();
        Self {
            k,
            lambda_bound: env.max_on(a, b),
            growth_constant: env.growth_constant(),
            upsilon: Upsilon::Envelope(Arc::new(env)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthViolation {
    pub t: f64,
    pub derivative: f64,
    pub allowed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub violations: Vec<GrowthViolation>,
    /// Smallest `K` with `|Υ′| ≤ K²Υ²` at every sample.
    pub tightest_k: f64,
}

/// Numerically checks `|Υ′(t)| ≤ K²Υ(t)²` at `samples` uniform points.
pub fn check_upsilon_derivative_bound(
    profile: &SmoothnessProfile,
    interval: (f64, f64),
    samples: usize,
) -> GrowthReport {
    assert!(samples >= 2, "need at least two samples");
    let (a, b) = interval;
    let h = 1e-5 * (b - a);
    let u = |t: f64| profile.upsilon.value(t);
    let k2 = profile.growth_constant * profile.growth_constant;
    let mut violations = Vec::new();
    let mut tightest: f64 = 0.0;
    for i in 0..samples {
        let t = a + (b - a) * i as f64 / (samples - 1) as f64;
        let derivative = if t - 2.0 * h < a {
            (-3.0 * u(t) + 4.0 * u(t + h) - u(t + 2.0 * h)) / (2.0 * h)
        } else if t + 2.0 * h > b {
            (3.0 * u(t) - 4.0 * u(t - h) + u(t - 2.0 * h)) / (2.0 * h)
        } else {
            (u(t - 2.0 * h) - 8.0 * u(t - h) + 8.0 * u(t + h) - u(t + 2.0 * h)) / (12.0 * h)
        };
        let v = u(t);
        if v > 0.0 {
            tightest = tightest.max((derivative.abs() / (v * v)).sqrt());
        }
        let allowed = k2 * v * v;
        if derivative.abs() > allowed * (1.0 + GROWTH_CHECK_SLACK) + f64::MIN_POSITIVE {
            violations.push(GrowthViolation { t, derivative, allowed });
        }
    }
    GrowthReport {
        violations,
        tightest_k: tightest,
    }
}

/// Bounds sampled over the smooth pieces of a Hamiltonian, inflated by
/// [`DECLARATION_MARGIN`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeclaredBounds {
    /// Upper bound on `max_t,α ‖H_α(t)‖_max`.
    pub h_max: f64,
    /// Upper bound on `max_t,α ‖∂_t H_α(t)‖`.
    pub max_dh: f64,
    /// Upper bound on `max_t ‖H(t)‖`.
    pub h_norm_max: f64,
    /// `Λ` at the requested order; infinite where a derivative blows up.
    pub lambda: f64,
}

/// Samples `points` times per smooth piece, approaching each jump from the left.
pub fn declare_bounds(ham: &Hamiltonian, order: usize, points: usize) -> DeclaredBounds {
    let mut out = DeclaredBounds {
        h_max: 0.0,
        max_dh: 0.0,
        h_norm_max: 0.0,
        lambda: 0.0,
    };
    let breaks = ham.discontinuities();
    for (a, b) in ham.smooth_pieces() {
        for i in 0..points {
            let mut t = a + (b - a) * i as f64 / (points - 1) as f64;
            if i == points - 1 && breaks.contains(&b) {
                t = b - 1e-9 * (b - a);
            }
            let mut sums = vec![0.0; order + 1];
            for term in ham.terms() {
                let norms = term.derivative_norms(t, order.max(1));
                if norms[1].is_finite() {
                    out.max_dh = out.max_dh.max(norms[1]);
                }
                for (s, n) in sums.iter_mut().zip(&norms) {
                    *s += if n.is_finite() { *n } else { f64::INFINITY };
                }
                out.h_max = out.h_max.max(term.max_element(t));
            }
            let h_norm = if ham.dim() > linalg::EXACT_NORM_MAX_DIM {
                sums[0]
            } else {
                linalg::hermitian_norm(&ham.evaluate(t))
            };
            out.h_norm_max = out.h_norm_max.max(h_norm);
            let floor = sums
                .iter()
                .enumerate()
                .map(|(p, s)| s.powf(1.0 / (p + 1) as f64))
                .fold(0.0, f64::max);
            out.lambda = out.lambda.max(floor);
        }
    }
    out.h_max *= DECLARATION_MARGIN;
    out.max_dh *= DECLARATION_MARGIN;
    out.h_norm_max *= DECLARATION_MARGIN;
    out.lambda *= DECLARATION_MARGIN;
    out
}
