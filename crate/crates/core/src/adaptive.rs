//! Adaptive step selection from `Υ(t)` and `K`, excision of discontinuities,
//! and the split-order search for singular Hamiltonians.

use std::fmt::Write as _;
use std::sync::Arc;

use log::warn;

use crate::error::{Error, Result};
use crate::hamiltonian::smoothness::{upsilon_floor, SmoothnessProfile, Upsilon, UpsilonEnvelope, DECLARATION_MARGIN};
use crate::hamiltonian::Hamiltonian;

const FIVE_THIRDS: f64 = 5.0 / 3.0;

/// Rounds of [`refine_r_iteratively`] before giving up.
pub const MAX_REFINE_ROUNDS: usize = 50;

/// Grid used to sample `Υ` when declaring an envelope profile.
pub const ENVELOPE_POINTS: usize = 20001;

/// `24d²k(5/3)^{k−1}`
fn step_constant(k: u32, d: usize) -> f64 {
    24.0 * (d * d) as f64 * k as f64 * FIVE_THIRDS.powi(k as i32 - 1)
}

/// `Y` for a run with `r` steps and integrator budget `eps`.
pub fn y_for(k: u32, d: usize, eps: f64, r: u64) -> f64 {
    step_constant(k, d) / (eps / r as f64).powf(1.0 / (2 * k + 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RGuess {
    pub a: f64,
    pub r_g: u64,
    pub y: f64,
}

/// `A = [24d²k(5/3)^{k−1}ῩΔt]^{1+1/2k}/ε^{1/2k}`, `r_g = ⌈A + 3K²ῩΔt + 1⌉`,
/// `Y = 24d²k(5/3)^{k−1}/(ε/r_g)^{1/(2k+1)}`.
pub fn guess_r(k: u32, d: usize, mean_dt: f64, eps: f64, growth: f64) -> Result<RGuess> {
    if k == 0 || d == 0 || !(mean_dt > 0.0) || !(eps > 0.0) || eps > 1.0 || growth < 0.0 {
        return Err(Error::Domain(format!(
            "guess_r needs positive inputs and ε ≤ 1 (k={k}, d={d}, ῩΔt={mean_dt}, ε={eps}, K={growth})"
        )));
    }
    let kf = k as f64;
    let a = (step_constant(k, d) * mean_dt).powf(1.0 + 1.0 / (2.0 * kf)) / eps.powf(1.0 / (2.0 * kf));
    let r_g = (a + 3.0 * growth * growth * mean_dt + 1.0).ceil();
    if !r_g.is_finite() || r_g > 1e15 {
        return Err(Error::Infeasible(format!("step bound {r_g} is not finite")));
    }
    let r_g = r_g as u64;
    Ok(RGuess {
        a,
        r_g,
        y: y_for(k, d, eps, r_g),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveSchedule {
    pub k: u32,
    /// `t0 < t1 < … < t_r`
    pub times: Vec<f64>,
    pub r_g: u64,
    pub y: f64,
    /// Upper bound on `Υ` over each step, from its left-endpoint value.
    pub certificates: Vec<f64>,
    /// Fixed point reached (always true for [`build_schedule`]).
    pub converged: bool,
    pub rounds: usize,
}

impl AdaptiveSchedule {
    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    /// Largest `max Υ·Δt_p·Y`; at most 1 for a valid schedule.
    pub fn worst_certificate(&self) -> f64 {
        self.times
            .windows(2)
            .zip(&self.certificates)
            .map(|(w, c)| c * (w[1] - w[0]) * self.y)
            .fold(0.0, f64::max)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "schedule {} {} {:e} {}", self.steps(), self.r_g, self.y, self.k).unwrap();
        for (w, c) in self.times.windows(2).zip(&self.certificates) {
            writeln!(s, "step {:e} {:e} {:e}", w[0], w[1], c).unwrap();
        }
        s
    }
}

/// Iterates `t_{p+1} = t_p + 1/(Υ(t_p)(Y + K²))`, truncating the final step.
/// Returns `None` once more than `limit` steps are needed.
fn recurrence(
    profile: &SmoothnessProfile,
    interval: (f64, f64),
    y: f64,
    limit: u64,
) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    let (t0, t1) = interval;
    let k2 = profile.growth_constant * profile.growth_constant;
    let mut times = vec![t0];
    let mut certs = Vec::new();
    let mut t = t0;
    while t < t1 {
        if certs.len() as u64 >= limit {
            return Ok(None);
        }
        let u = profile.upsilon.value(t);
        if !u.is_finite() {
            return Err(Error::Infeasible(format!("Υ is unbounded at t={t}")));
        }
        let (next, cert) = if u <= 0.0 {
            (t1, 0.0)
        } else {
            let delta = 1.0 / (u * (y + k2));
            let next = (t + delta).min(t1);
            (next, u / (1.0 - k2 * u * (next - t)))
        };
        if next <= t {
            return Err(Error::Infeasible(format!("step at t={t} underflows")));
        }
        times.push(next);
        certs.push(cert);
        t = next;
    }
    Ok(Some((times, certs)))
}

fn check_interval(interval: (f64, f64)) -> Result<()> {
    if !(interval.1 > interval.0) {
        return Err(Error::InvalidInput(format!(
            "empty interval [{}, {}]",
            interval.0, interval.1
        )));
    }
    Ok(())
}

/// Adaptive times from the a-priori bound `r_g`.
pub fn build_schedule(
    profile: &SmoothnessProfile,
    interval: (f64, f64),
    d: usize,
    eps: f64,
) -> Result<AdaptiveSchedule> {
    check_interval(interval)?;
    let k = profile.k;
    let mean_dt = profile.upsilon.integral(interval.0, interval.1);
    let guess = guess_r(k, d, mean_dt, eps, profile.growth_constant)?;
    let (times, certificates) = recurrence(profile, interval, guess.y, guess.r_g)?.ok_or(Error::ScheduleOverrun {
        r: guess.r_g as usize + 1,
        r_g: guess.r_g,
    })?;
    Ok(AdaptiveSchedule {
        k,
        times,
        r_g: guess.r_g,
        y: guess.y,
        certificates,
        converged: true,
        rounds: 1,
    })
}

/// Feeds the step count back into `Y` until it stops changing.
pub fn refine_r_iteratively(
    profile: &SmoothnessProfile,
    interval: (f64, f64),
    d: usize,
    eps: f64,
) -> Result<AdaptiveSchedule> {
    let mut sched = build_schedule(profile, interval, d, eps)?;
    let mut r = sched.r_g;
    for round in 1..=MAX_REFINE_ROUNDS {
        let y = y_for(profile.k, d, eps, r);
        let (times, certificates) = recurrence(profile, interval, y, r)?.ok_or(Error::ScheduleOverrun {
            r: r as usize + 1,
            r_g: sched.r_g,
        })?;
        let count = (times.len() - 1) as u64;
        sched.times = times;
        sched.certificates = certificates;
        sched.y = y;
        sched.rounds = round;
        if count == r {
            sched.converged = true;
            return Ok(sched);
        }
        r = count;
    }
    warn!("step refinement did not reach a fixed point in {MAX_REFINE_ROUNDS} rounds");
    sched.converged = false;
    Ok(sched)
}

/// Envelope profile whose slope minimizes `r_g` over `tune`.
///
/// `Υ` is the Lipschitz minorant construction of [`UpsilonEnvelope`] over the
/// whole Hamiltonian interval; slopes `2^j`, `j = −4..=12`, are tried and the
/// one giving the smallest a-priori step bound on `tune` is kept.
pub fn declare_profile(ham: &Hamiltonian, k: u32, d: usize, eps: f64, tune: (f64, f64)) -> Result<SmoothnessProfile> {
    let (a, b) = ham.interval();
    let order = 2 * k as usize;
    let floor: Vec<f64> = (0..ENVELOPE_POINTS)
        .map(|i| {
            let t = a + (b - a) * i as f64 / (ENVELOPE_POINTS - 1) as f64;
            upsilon_floor(ham.terms(), order, t).unwrap_or(f64::INFINITY)
        })
        .collect();
    let mut best: Option<(u64, SmoothnessProfile)> = None;
    for j in -4..=12 {
        let env = UpsilonEnvelope::from_samples(a, b, &floor, 2f64.powi(j), DECLARATION_MARGIN);
        let profile = SmoothnessProfile {
            k,
            lambda_bound: env.max_on(a, b),
            growth_constant: env.growth_constant(),
            upsilon: Upsilon::Envelope(Arc::new(env)),
        };
        let mean_dt = profile.upsilon.integral(tune.0, tune.1);
        let Ok(g) = guess_r(k, d, mean_dt, eps, profile.growth_constant) else {
            continue;
        };
        if best.as_ref().is_none_or(|(r, _)| g.r_g < *r) {
            best = Some((g.r_g, profile));
        }
    }
    best.map(|(_, p)| p)
        .ok_or_else(|| Error::Infeasible(format!("no finite step bound for {}", ham.name())))
}

/// Result of excising `δ`-neighbourhoods around discontinuities.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscontinuitySplit {
    pub delta: f64,
    pub pieces: Vec<(f64, f64)>,
    /// Integrator budget of each piece, `ε·len/(3Δt)`.
    pub budgets: Vec<f64>,
    /// Bound on the skipped evolution, `(L+2)(e^{2H_max δ} − 1)`.
    pub omitted_error: f64,
}

pub fn split_discontinuities(
    interval: (f64, f64),
    breaks: &[f64],
    h_norm_max: f64,
    eps: f64,
    cell: f64,
) -> Result<DiscontinuitySplit> {
    check_interval(interval)?;
    if !(eps > 0.0) || !(h_norm_max > 0.0) {
        return Err(Error::Domain("splitting needs ε > 0 and H_max > 0".into()));
    }
    let mut points = vec![interval.0];
    points.extend(breaks.iter().copied().filter(|&b| b > interval.0 && b < interval.1));
    points.push(interval.1);
    let jumps = points.len() - 2;
    let min_gap = points.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if cell >= min_gap {
        return Err(Error::Infeasible(format!(
            "mesh cell {cell} is not below the smallest gap {min_gap} between discontinuities"
        )));
    }
    let delta = (0.5 * (min_gap - cell)).min((1.0 + (eps / 6.0) / (jumps + 2) as f64).ln() / (2.0 * h_norm_max));
    let dt = interval.1 - interval.0;
    let pieces: Vec<(f64, f64)> = points.windows(2).map(|w| (w[0] + delta, w[1] - delta)).collect();
    let budgets = pieces.iter().map(|(a, b)| eps * (b - a) / (3.0 * dt)).collect();
    let omitted_error = (jumps + 2) as f64 * ((2.0 * h_norm_max * delta).exp() - 1.0);
    Ok(DiscontinuitySplit {
        delta,
        pieces,
        budgets,
        omitted_error,
    })
}

/// Profiles at `k = 1` (left part) and `k = 2` (right part) of a split search.
#[derive(Debug, Clone)]
pub struct SplitProfiles {
    pub low: SmoothnessProfile,
    pub high: SmoothnessProfile,
    pub d: usize,
    pub m: usize,
}

/// Exponentials needed by one refined adaptive part; `None` if infeasible.
pub fn part_cost(profile: &SmoothnessProfile, interval: (f64, f64), d: usize, m: usize, eps: f64) -> Option<u64> {
    if !(interval.1 > interval.0) {
        return Some(0);
    }
    let sched = refine_r_iteratively(profile, interval, d, eps).ok()?;
    Some(2 * m as u64 * 5u64.pow(profile.k - 1) * sched.steps() as u64)
}

/// Total exponentials with `[start, t′]` at `k = 1` and `[t′, end]` at `k = 2`,
/// each part receiving a share of `eps` proportional to its length.
pub fn split_cost(sp: &SplitProfiles, interval: (f64, f64), split: f64, eps: f64) -> Option<u64> {
    let (a, b) = interval;
    let span = b - a;
    let left = part_cost(&sp.low, (a, split), sp.d, sp.m, eps * (split - a) / span)?;
    let right = part_cost(&sp.high, (split, b), sp.d, sp.m, eps * (b - split) / span)?;
    Some(left + right)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitOptimum {
    pub split: f64,
    pub cost: u64,
    /// `(t′, cost)` of the initial scan; `None` where infeasible.
    pub curve: Vec<(f64, Option<u64>)>,
    /// The scan found more than one local minimum.
    pub multimodal: bool,
}

/// Scans `scan_points` split times, then golden-section refines around the
/// best one down to `tol` in `t′`.
pub fn optimize_adaptive_k(
    sp: &SplitProfiles,
    interval: (f64, f64),
    eps: f64,
    scan_points: usize,
    tol: f64,
) -> Result<SplitOptimum> {
    let (a, b) = interval;
    let cost = |t: f64| split_cost(sp, interval, t, eps);
    let grid: Vec<f64> = (1..=scan_points)
        .map(|i| a + (b - a) * i as f64 / scan_points as f64)
        .collect();
    let curve: Vec<(f64, Option<u64>)> = grid.iter().map(|&t| (t, cost(t))).collect();
    let value = |c: Option<u64>| c.map_or(f64::INFINITY, |v| v as f64);
    let (best_i, _) = curve
        .iter()
        .enumerate()
        .min_by(|x, y| value(x.1 .1).total_cmp(&value(y.1 .1)))
        .expect("scan is not empty");
    if curve[best_i].1.is_none() {
        return Err(Error::Infeasible("every split point is infeasible".into()));
    }
    let minima = (0..curve.len())
        .filter(|&i| {
            let v = value(curve[i].1);
            let left = i == 0 || value(curve[i - 1].1) > v;
            let right = i + 1 == curve.len() || value(curve[i + 1].1) >= v;
            left && right && v.is_finite()
        })
        .count();
    let mut lo = if best_i == 0 {
        a + (b - a) * 1e-6
    } else {
        grid[best_i - 1]
    };
    let mut hi = if best_i + 1 == grid.len() { b } else { grid[best_i + 1] };
    let mut best = (curve[best_i].0, curve[best_i].1.unwrap());
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (value(cost(x1)), value(cost(x2)));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = value(cost(x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = value(cost(x2));
        }
        for (x, f) in [(x1, f1), (x2, f2)] {
            if f < best.1 as f64 {
                best = (x, f as u64);
            }
        }
    }
    if minima > 1 {
        warn!("split cost has {minima} local minima on the scan grid");
    }
    Ok(SplitOptimum {
        split: best.0,
        cost: best.1,
        curve,
        multimodal: minima > 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(u: f64) -> SmoothnessProfile {
        SmoothnessProfile {
            k: 1,
            lambda_bound: u,
            upsilon: Upsilon::Constant(u),
            growth_constant: 0.0,
        }
    }

    #[test]
    fn guess_example() {
        let g = guess_r(1, 1, 1.0, 0.01, 0.0).unwrap();
        assert!((g.a - 24f64.powf(1.5) * 10.0).abs() < 1e-9);
        assert_eq!(g.r_g, 1177);
        let tighter = guess_r(1, 1, 1.0, 0.001, 0.0).unwrap();
        assert!(tighter.y > g.y);
        assert!(guess_r(1, 1, 0.0, 0.01, 0.0).is_err());
    }

    #[test]
    fn constant_upsilon_gives_uniform_steps() {
        let s = build_schedule(&constant(2.0), (0.0, 1.0), 1, 0.01).unwrap();
        let width = 1.0 / (2.0 * s.y);
        for w in s.times.windows(2).take(s.steps() - 1) {
            assert!((w[1] - w[0] - width).abs() < 1e-12);
        }
        assert!(s.steps() as u64 <= s.r_g);
        let refined = refine_r_iteratively(&constant(2.0), (0.0, 1.0), 1, 0.01).unwrap();
        assert!(refined.converged && refined.rounds <= 3);
        // For constant Υ the a-priori guess already sits at the fixed point.
        assert!(refined.steps() <= s.steps() && refined.steps() + 2 >= s.steps());
    }

    #[test]
    fn pole_schedule_certificates() {
        let profile = SmoothnessProfile {
            k: 1,
            lambda_bound: 2.0,
            upsilon: Upsilon::function(|t| 1.0 / (1.0 - t)),
            growth_constant: 1.0,
        };
        let s = build_schedule(&profile, (0.0, 0.5), 1, 0.01).unwrap();
        assert!(s.steps() as u64 <= s.r_g);
        assert!(s.worst_certificate() <= 1.0 + 1e-12);
        for (w, c) in s.times.windows(2).zip(&s.certificates) {
            // Υ is increasing, so its maximum over the step is at the right end.
            assert!(1.0 / (1.0 - w[1]) <= c * (1.0 + 1e-12));
        }
        let widths: Vec<f64> = s.times.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(widths[0] > widths[widths.len() - 2]);
    }

    #[test]
    fn split_examples() {
        let s = split_discontinuities((0.0, 1.0), &[0.5], 1.0, 0.06, 1e-9).unwrap();
        assert!((s.delta - 0.5 * (1.0 + 0.01 / 3.0_f64).ln()).abs() < 1e-15);
        assert!((s.delta - 0.0016639).abs() < 1e-7);
        assert_eq!(s.pieces.len(), 2);
        assert!(s.budgets.iter().sum::<f64>() < 0.06 / 3.0);
        assert!(s.omitted_error <= 0.06 / 6.0 * (1.0 + 1e-12));

        let none = split_discontinuities((0.0, 1.0), &[], 1.0, 0.06, 1e-9).unwrap();
        assert_eq!(none.pieces, vec![(none.delta, 1.0 - none.delta)]);
        assert!(split_discontinuities((0.0, 1.0), &[0.5], 1.0, 0.06, 0.6).is_err());
    }
}
