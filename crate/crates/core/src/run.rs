//! End-to-end runs: plan from a configuration, execute, compare, account.

use std::time::Instant;

use rayon::prelude::*;

use crate::adaptive::{
    declare_profile, part_cost, refine_r_iteratively, split_discontinuities, AdaptiveSchedule, DiscontinuitySplit,
    SplitOptimum, SplitProfiles,
};
use crate::config::{Mode, RunConfig};
use crate::cost::{self, CostReport};
use crate::error::{Error, Result};
use crate::executor::{plan_unitary, ElementSource};
use crate::hamiltonian::catalog::CatalogEntry;
use crate::hamiltonian::smoothness::{declare_bounds, DeclaredBounds};
use crate::hamiltonian::Hamiltonian;
use crate::integrator::{clamped_step_count, uniform_times, ClassLayout, ExponentialPlan, Segment};
use crate::linalg::CMatrix;
use crate::oracle::{precision_requirements, OracleConfig, QueryLedger};
use crate::reference::{exact_propagator, operator_error, DEFAULT_TOL};

/// Default end time of the singular catalog entry.
pub const SINGULAR_END: f64 = 2.0;
/// Samples per smooth piece when declaring `Λ`, `h_max` and friends.
pub const BOUND_SAMPLES: usize = 4096;
/// Largest dimension `simulate` will execute.
pub const SIMULATE_MAX_DIM: usize = 64;

/// Share of `ε` given to the adaptive schedule; the other parts go to
/// round-off and to the slack of the per-step bound.
pub fn adaptive_schedule_epsilon(eps: f64) -> f64 {
    eps / 4.0
}

#[derive(Debug, Clone)]
pub struct Planned {
    pub config: RunConfig,
    pub ham: Hamiltonian,
    pub layout: ClassLayout,
    pub interval: (f64, f64),
    pub plan: ExponentialPlan,
    pub schedule: Option<AdaptiveSchedule>,
    pub split: Option<DiscontinuitySplit>,
    pub oracle: OracleConfig,
    pub bounds: DeclaredBounds,
    pub report: CostReport,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub error: f64,
    pub unitary: CMatrix,
    pub ledger: QueryLedger,
    pub report: CostReport,
    pub seconds: f64,
    /// Every violated guarantee, empty on success.
    pub violations: Vec<String>,
}

fn run_interval(config: &RunConfig, ham: &Hamiltonian) -> Result<(f64, f64)> {
    let (a, b) = ham.interval();
    let t0 = config.t0.unwrap_or(a);
    let t1 = config.dt.map_or(b, |dt| t0 + dt);
    if t0 < a || t1 > b * (1.0 + 1e-12) || !(t1 > t0) {
        return Err(Error::Config {
            key: "simulation.dt".into(),
            message: format!("[{t0}, {t1}] is not inside the Hamiltonian interval [{a}, {b}]"),
        });
    }
    Ok((t0, t1.min(b)))
}

pub fn plan(config: &RunConfig) -> Result<Planned> {
    let ham = config.catalog.build()?;
    let layout = ClassLayout::of_hamiltonian(&ham)?;
    let (t0, t1) = run_interval(config, &ham)?;
    let dt = t1 - t0;
    let (k, eps) = (config.k, config.epsilon);
    let d = ham.sparsity()?;
    let terms = ham.term_count();
    let bounds = declare_bounds(&ham, 2 * k as usize, BOUND_SAMPLES);

    let (req_t, req_v) = precision_requirements(
        k,
        terms,
        d,
        dt,
        eps,
        bounds.max_dh.max(f64::MIN_POSITIVE),
        bounds.h_max.max(f64::MIN_POSITIVE),
    )?;
    let time_bits = config.time_bits_override.unwrap_or(req_t);
    let value_qubits = config.value_qubits_override.unwrap_or(req_v);
    let mut oracle = OracleConfig::new(time_bits, value_qubits, bounds.h_max.max(f64::MIN_POSITIVE), t0, dt)?;
    let c = cost::one_sparse_query_cost(ham.qubits() as u64, value_qubits);

    let mut schedule = None;
    let mut split = None;
    let mut r_g = None;
    let mut mean_dt = bounds.lambda * dt;
    let (segments, n_exp_formula) = match config.mode {
        Mode::Constant => {
            if !bounds.lambda.is_finite() {
                return Err(Error::Infeasible("Λ is not finite on the interval".into()));
            }
            let r = clamped_step_count(k, d, bounds.lambda, dt, eps)?;
            let segs = uniform_segments(t0, t1, r, k)?;
            (segs, cost::constant_step_exp_bound(k, terms, d, bounds.lambda, dt, eps))
        }
        Mode::Adaptive => {
            let eps_s = adaptive_schedule_epsilon(eps);
            let profile = declare_profile(&ham, k, d, eps_s, (t0, t1))?;
            let sched = refine_r_iteratively(&profile, (t0, t1), d, eps_s)?;
            mean_dt = profile.upsilon.integral(t0, t1);
            r_g = Some(sched.r_g);
            let segs = sched
                .times
                .windows(2)
                .map(|w| Segment::new(w[0], w[1], k))
                .collect::<Result<Vec<_>>>()?;
            schedule = Some(sched);
            (
                segs,
                cost::adaptive_exp_bound(k, terms, d, mean_dt, eps, profile.growth_constant),
            )
        }
        Mode::Piecewise => {
            let limit = 27.0 * (5.0_f64 / 3.0).powi(k as i32 - 1) * (d * d) as f64 * bounds.lambda * dt;
            if eps > limit.min(1.0) {
                return Err(Error::Domain(format!(
                    "ε={eps} exceeds the piecewise limit {}",
                    limit.min(1.0)
                )));
            }
            let breaks: Vec<f64> = ham
                .discontinuities()
                .into_iter()
                .filter(|&b| b > t0 && b < t1)
                .collect();
            let (s, segs) = piecewise_segments(config, &bounds, d, (t0, t1), &breaks, oracle.cell())?;
            let bound = cost::piecewise_exp_bound(k, terms, d, bounds.lambda, dt, eps, breaks.len());
            split = Some(s);
            (segs, bound)
        }
    };
    // Every step must span at least one mesh cell for time rounding to stay
    // inside it; refine the mesh when the step count outgrows it.
    let mut segments = segments;
    if config.time_bits_override.is_none() {
        for _ in 0..4 {
            let needed = mesh_bits_for(dt, &segments);
            if needed <= oracle.time_bits {
                break;
            }
            oracle = OracleConfig::new(needed, value_qubits, oracle.h_max, t0, dt)?;
            if let Some(old) = &split {
                let breaks: Vec<f64> = ham
                    .discontinuities()
                    .into_iter()
                    .filter(|&b| b > t0 && b < t1)
                    .collect();
                let (s, segs) = piecewise_segments(config, &bounds, d, (t0, t1), &breaks, oracle.cell())?;
                debug_assert_eq!(s.pieces.len(), old.pieces.len());
                split = Some(s);
                segments = segs;
            }
        }
    }
    let time_bits = oracle.time_bits;
    let plan = ExponentialPlan::build(segments, &layout);
    let n_exp_actual = plan.exponential_count() as u64;
    let report = CostReport {
        k,
        terms,
        d,
        m_bound: 6 * terms * d * d,
        m_actual: layout.class_count(),
        r: plan.segments.len() as u64,
        r_g,
        time_bits,
        value_qubits,
        c,
        n_exp_formula,
        n_exp_actual,
        n_oracle_formula: c.saturating_mul(n_exp_formula),
        n_oracle_measured: None,
        n_t_formula: n_exp_formula / (3 * d * d) as u64,
        n_t_actual: plan.transform_count() as u64,
        n_t_measured: None,
        k_star: cost::near_linear_k(d, mean_dt, eps).unwrap_or(1),
        space_estimate: cost::space_estimate(ham.qubits() as u64),
    };
    Ok(Planned {
        config: config.clone(),
        ham,
        layout,
        interval: (t0, t1),
        plan,
        schedule,
        split,
        oracle,
        bounds,
        report,
    })
}

fn piecewise_segments(
    config: &RunConfig,
    bounds: &DeclaredBounds,
    d: usize,
    interval: (f64, f64),
    breaks: &[f64],
    cell: f64,
) -> Result<(DiscontinuitySplit, Vec<Segment>)> {
    let k = config.k;
    let s = split_discontinuities(interval, breaks, bounds.h_norm_max, config.epsilon, cell)?;
    let mut segs = Vec::new();
    for (&(a, b), &budget) in s.pieces.iter().zip(&s.budgets) {
        let r = clamped_step_count(k, d, bounds.lambda, b - a, 2.0 * budget)?;
        segs.extend(uniform_segments(a, b, r, k)?);
    }
    Ok((s, segs))
}

/// Smallest `n′` whose mesh cell fits inside every segment.
fn mesh_bits_for(dt: f64, segments: &[Segment]) -> u32 {
    let shortest = segments.iter().map(Segment::len).fold(f64::INFINITY, f64::min);
    if !shortest.is_finite() {
        return 1;
    }
    // a little headroom so float noise in segment ends cannot matter
    ((dt / shortest).log2().ceil() as u32 + 1).max(1)
}

fn uniform_segments(a: f64, b: f64, r: u64, k: u32) -> Result<Vec<Segment>> {
    uniform_times(a, b, r)
        .windows(2)
        .map(|w| Segment::new(w[0], w[1], k))
        .collect()
}

/// Which element values drive execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elements {
    Exact,
    Discretized,
}

/// Executes the plan as a full operator and measures the two-norm error.
pub fn simulate(planned: &Planned, elements: Elements) -> Result<Outcome> {
    let dim = planned.ham.dim();
    if dim > SIMULATE_MAX_DIM {
        return Err(Error::InvalidInput(format!(
            "dimension {dim} exceeds {SIMULATE_MAX_DIM}; use plan-only mode for larger systems"
        )));
    }
    let start = Instant::now();
    let source = match elements {
        Elements::Exact => ElementSource::Exact,
        Elements::Discretized => ElementSource::Discretized(planned.oracle),
    };
    let mut ledger = QueryLedger::new();
    let v = plan_unitary(
        &planned.plan,
        &planned.ham,
        &planned.layout,
        source,
        planned.oracle.value_qubits,
        &mut ledger,
    )?;
    let (t0, t1) = planned.interval;
    let u = exact_propagator(&planned.ham, t0, t1, DEFAULT_TOL)?;
    let error = operator_error(&u, &v);
    let mut report = planned.report.clone();
    report.n_oracle_measured = Some(ledger.oracle_queries());
    report.n_t_measured = Some(ledger.transform_calls());
    let mut violations = Vec::new();
    if error > planned.config.epsilon {
        violations.push(format!(
            "operator error {error:e} exceeds ε={:e}",
            planned.config.epsilon
        ));
    }
    if let Err(e) = report.reconcile() {
        violations.push(e);
    }
    if ledger.value_bit_queries() != 3 * planned.oracle.value_qubits as u64 * ledger.exponentials() {
        violations.push("value-bit charge differs from 3n″ per exponential".into());
    }
    Ok(Outcome {
        error,
        unitary: v,
        ledger,
        report,
        seconds: start.elapsed().as_secs_f64(),
        violations,
    })
}

/// One row of the Gaussian width sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianRow {
    pub a: f64,
    pub n_exp_adaptive: u64,
    pub n_exp_constant: u64,
}

/// Exponentials of the adaptive (refined) and constant-step planners for one width.
pub fn gaussian_costs(a: f64, eps: f64, k: u32) -> Result<GaussianRow> {
    let ham = CatalogEntry::Gaussian { a }.build()?;
    let layout = ClassLayout::of_hamiltonian(&ham)?;
    let m = layout.class_count() as u64;
    let d = ham.sparsity()?;
    let interval = ham.interval();
    let per_step = 2 * m * 5u64.pow(k - 1);
    let bounds = declare_bounds(&ham, 2 * k as usize, BOUND_SAMPLES);
    let r_const = clamped_step_count(k, d, bounds.lambda, interval.1 - interval.0, eps)?;
    let eps_s = adaptive_schedule_epsilon(eps);
    let profile = declare_profile(&ham, k, d, eps_s, interval)?;
    let sched = refine_r_iteratively(&profile, interval, d, eps_s)?;
    Ok(GaussianRow {
        a,
        n_exp_adaptive: per_step * sched.steps() as u64,
        n_exp_constant: per_step * r_const,
    })
}

/// [`gaussian_costs`] for every width, evaluated in parallel, rows in input order.
pub fn sweep_gaussian(widths: &[f64], eps: f64, k: u32) -> Result<Vec<GaussianRow>> {
    widths.par_iter().map(|&a| gaussian_costs(a, eps, k)).collect()
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularStudy {
    pub end: f64,
    /// Whole interval at `k = 1`; `None` if infeasible.
    pub single_k1: Option<u64>,
    /// Whole interval at `k = 2`; `None` if infeasible.
    pub single_k2: Option<u64>,
    /// `k = 2` on `[x, end]` for shrinking `x`; each is a lower bound on the
    /// whole-interval `k = 2` cost when that one is infeasible.
    pub k2_truncated: Vec<(f64, Option<u64>)>,
    pub optimum: SplitOptimum,
}

/// Grid points of the split scan in [`optimize_singular`].
pub const SPLIT_SCAN_POINTS: usize = 40;

/// Split-order search on `t⁵ sin(1/t) e^{−t}` over `[0, end]`.
pub fn optimize_singular(end: f64, eps: f64) -> Result<SingularStudy> {
    let ham = CatalogEntry::Singular { end }.build()?;
    let layout = ClassLayout::of_hamiltonian(&ham)?;
    let d = ham.sparsity()?;
    let eps_s = adaptive_schedule_epsilon(eps);
    let low = declare_profile(&ham, 1, d, eps_s, (0.0, end))?;
    // Υ at order 4 is unbounded at the origin, so tune away from it.
    let high = declare_profile(&ham, 2, d, eps_s, (0.5 * end, end))?;
    let sp = SplitProfiles {
        low,
        high,
        d,
        m: layout.class_count(),
    };
    let single_k1 = part_cost(&sp.low, (0.0, end), d, sp.m, eps_s);
    let single_k2 = part_cost(&sp.high, (0.0, end), d, sp.m, eps_s);
    let k2_truncated = (1..=3)
        .map(|j| {
            let x = end * 10f64.powi(-j);
            let cost = declare_profile(&ham, 2, d, eps_s, (x, end))
                .ok()
                .and_then(|p| part_cost(&p, (x, end), d, sp.m, eps_s));
            (x, cost)
        })
        .collect();
    let optimum = crate::adaptive::optimize_adaptive_k(&sp, (0.0, end), eps_s, SPLIT_SCAN_POINTS, 1e-3)?;
    Ok(SingularStudy {
        end,
        single_k1,
        single_k2,
        k2_truncated,
        optimum,
    })
}

/// Convenience for tests and tools: parse, plan and simulate.
pub fn run_config_text(text: &str, elements: Elements) -> Result<Outcome> {
    let config = RunConfig::parse(text)?;
    simulate(&plan(&config)?, elements)
}
