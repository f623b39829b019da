//! Recursive Lie–Trotter–Suzuki layouts: which one-sparse exponential runs
//! when, for how long, and at which evaluation time.

use std::fmt::Write as _;

use crate::decomposition::{decompose_one_sparse, OneSparseTerm};
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;

pub use crate::executor::execute_plan;

/// `s_ℓ = 1/(4 − 4^{1/(2ℓ−1)})`.
pub fn suzuki_fractions(level: u32) -> Result<f64> {
    if level < 2 {
        return Err(Error::Domain(format!("recursion level must be ≥ 2, got {level}")));
    }
    Ok(1.0 / (4.0 - 4f64.powf(1.0 / (2 * level - 1) as f64)))
}

/// One time step `[start, end]` integrated at order `2k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub k: u32,
}

impl Segment {
    pub fn new(start: f64, end: f64, k: u32) -> Result<Self> {
        if !(end > start) || k == 0 {
            return Err(Error::InvalidInput(format!("bad segment [{start}, {end}] with k={k}")));
        }
        Ok(Self { start, end, k })
    }

    pub fn len(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    /// Apply `T_α` to the state.
    Transform { term: usize },
    /// Apply `T_α†` to the state.
    InverseTransform { term: usize },
    /// `exp(−i H_{α,color}(time) duration)` inside segment `segment`.
    Exp {
        segment: usize,
        term: usize,
        color: usize,
        time: f64,
        duration: f64,
    },
}

/// Colour classes of every term in execution order, plus which terms carry a
/// non-identity basis transform.
#[derive(Debug, Clone)]
pub struct ClassLayout {
    pub classes: Vec<Vec<OneSparseTerm>>,
    pub transformed: Vec<bool>,
}

impl ClassLayout {
    pub fn of_hamiltonian(ham: &Hamiltonian) -> Result<Self> {
        let classes = ham
            .terms()
            .iter()
            .enumerate()
            .map(|(i, t)| decompose_one_sparse(i, t.pattern()))
            .collect::<Result<Vec<_>>>()?;
        let transformed = ham.terms().iter().map(|t| t.transform().is_some()).collect();
        Ok(Self { classes, transformed })
    }

    /// `m`: total number of colour classes.
    pub fn class_count(&self) -> usize {
        self.classes.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialPlan {
    pub segments: Vec<Segment>,
    pub steps: Vec<Step>,
}

fn first_order(layout: &ClassLayout, seg: usize, a: f64, b: f64, out: &mut Vec<Step>) {
    let time = 0.5 * (a + b);
    let duration = 0.5 * (b - a);
    let groups = layout.classes.iter().enumerate();
    let emit = |term: usize, colors: &mut dyn Iterator<Item = usize>, out: &mut Vec<Step>| {
        if layout.transformed[term] {
            out.push(Step::Transform { term });
        }
        for color in colors {
            out.push(Step::Exp {
                segment: seg,
                term,
                color,
                time,
                duration,
            });
        }
        if layout.transformed[term] {
            out.push(Step::InverseTransform { term });
        }
    };
    for (term, classes) in groups.clone() {
        if !classes.is_empty() {
            emit(term, &mut (0..classes.len()), out);
        }
    }
    for (term, classes) in groups.rev() {
        if !classes.is_empty() {
            emit(term, &mut (0..classes.len()).rev(), out);
        }
    }
}

fn recurse(layout: &ClassLayout, seg: usize, level: u32, a: f64, b: f64, out: &mut Vec<Step>) {
    if level == 1 {
        first_order(layout, seg, a, b, out);
        return;
    }
    let s = suzuki_fractions(level).expect("level ≥ 2");
    let len = b - a;
    let cuts = [0.0, s, 2.0 * s, 1.0 - 2.0 * s, 1.0 - s, 1.0];
    for w in cuts.windows(2) {
        recurse(layout, seg, level - 1, a + w[0] * len, a + w[1] * len, out);
    }
}

/// Steps of `U_k` over one segment, in application order.
pub fn build_segment_plan(segment: &Segment, index: usize, layout: &ClassLayout) -> Vec<Step> {
    let mut out = Vec::new();
    if layout.class_count() > 0 {
        recurse(layout, index, segment.k, segment.start, segment.end, &mut out);
    }
    out
}

impl ExponentialPlan {
    pub fn build(segments: Vec<Segment>, layout: &ClassLayout) -> Self {
        let mut steps = Vec::new();
        for (i, seg) in segments.iter().enumerate() {
            steps.extend(build_segment_plan(seg, i, layout));
        }
        Self { segments, steps }
    }

    /// Segments between consecutive `times`, all at order `2k`.
    pub fn from_times(times: &[f64], k: u32, layout: &ClassLayout) -> Result<Self> {
        let segments = times
            .windows(2)
            .map(|w| Segment::new(w[0], w[1], k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::build(segments, layout))
    }

    pub fn exponential_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Exp { .. })).count()
    }

    pub fn transform_count(&self) -> usize {
        self.steps.len() - self.exponential_count()
    }

    pub fn boundaries(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.segments.iter().map(|s| s.start).collect();
        if let Some(last) = self.segments.last() {
            out.push(last.end);
        }
        out
    }

    /// Line-oriented text form; floats use the shortest round-trip notation.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "plan {} {}", self.segments.len(), self.steps.len()).unwrap();
        for seg in &self.segments {
            writeln!(s, "segment {:e} {:e} {}", seg.start, seg.end, seg.k).unwrap();
        }
        for step in &self.steps {
            match *step {
                Step::Transform { term } => writeln!(s, "transform {term}"),
                Step::InverseTransform { term } => writeln!(s, "inverse {term}"),
                Step::Exp {
                    segment,
                    term,
                    color,
                    time,
                    duration,
                } => {
                    writeln!(s, "exp {segment} {term} {color} {time:e} {duration:e}")
                }
            }
            .unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        fn field<T: std::str::FromStr>(it: &mut std::str::SplitWhitespace<'_>, line: usize) -> Result<T> {
            it.next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::InvalidInput(format!("malformed plan line {line}")))
        }
        let mut segments = Vec::new();
        let mut steps = Vec::new();
        for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let mut it = line.split_whitespace();
            match it.next() {
                Some("plan") => {}
                Some("segment") => segments.push(Segment {
                    start: field(&mut it, n)?,
                    end: field(&mut it, n)?,
                    k: field(&mut it, n)?,
                }),
                Some("transform") => steps.push(Step::Transform {
                    term: field(&mut it, n)?,
                }),
                Some("inverse") => steps.push(Step::InverseTransform {
                    term: field(&mut it, n)?,
                }),
                Some("exp") => steps.push(Step::Exp {
                    segment: field(&mut it, n)?,
                    term: field(&mut it, n)?,
                    color: field(&mut it, n)?,
                    time: field(&mut it, n)?,
                    duration: field(&mut it, n)?,
                }),
                _ => return Err(Error::InvalidInput(format!("unknown plan line {n}: {line}"))),
            }
        }
        Ok(Self { segments, steps })
    }
}

/// `r = ⌈2ε^{−1/2k}(2k(5/3)^{k−1}ΛΔt)^{1+1/2k}⌉`.
///
/// Requires `ε ≤ (9/10)(5/3)^k ΛΔt`; callers clamp with [`clamped_step_count`].
pub fn constant_step_count(k: u32, lambda: f64, dt: f64, eps: f64) -> Result<u64> {
    if k == 0 || !(eps > 0.0) || lambda < 0.0 || !(dt > 0.0) {
        return Err(Error::Domain(
            "constant step count needs k ≥ 1, ε > 0, Λ ≥ 0, Δt > 0".into(),
        ));
    }
    let ld = lambda * dt;
    if ld == 0.0 {
        return Ok(1);
    }
    let kf = k as f64;
    let limit = 0.9 * (5.0_f64 / 3.0).powi(k as i32) * ld;
    if eps > limit * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "ε={eps} exceeds the step-count regime limit {limit}"
        )));
    }
    let inner = 2.0 * kf * (5.0_f64 / 3.0).powi(k as i32 - 1) * ld;
    let r = 2.0 * eps.powf(-1.0 / (2.0 * kf)) * inner.powf(1.0 + 1.0 / (2.0 * kf));
    Ok((r.ceil() as u64).max(1))
}

/// `ε̃ = min{ε, 18(5/3)^{k−1}d²ΛΔt}`.
pub fn clamp_epsilon(k: u32, d: usize, lambda: f64, dt: f64, eps: f64) -> f64 {
    eps.min(18.0 * (5.0_f64 / 3.0).powi(k as i32 - 1) * (d * d) as f64 * lambda * dt)
}

/// Steps for a `d`-sparse run split into `6d²` one-sparse pieces: the
/// per-term smoothness grows to `6d²Λ` and the integrator gets `ε̃/2`.
pub fn clamped_step_count(k: u32, d: usize, lambda: f64, dt: f64, eps: f64) -> Result<u64> {
    let tilde = clamp_epsilon(k, d, lambda, dt, eps);
    if lambda * dt == 0.0 {
        return Ok(1);
    }
    constant_step_count(k, 6.0 * (d * d) as f64 * lambda, dt, tilde / 2.0)
}

/// `r + 1` evenly spaced times from `t0` to `t1`.
pub fn uniform_times(t0: f64, t1: f64, r: u64) -> Vec<f64> {
    let mut out: Vec<f64> = (0..=r).map(|i| t0 + (t1 - t0) * i as f64 / r as f64).collect();
    out[r as usize] = t1;
    out
}
