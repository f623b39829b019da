//! Scalar time dependences available to catalog Hamiltonians.

use super::jet::Jet;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigMode {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

/// A real scalar function of time with derivatives of every order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TimeFunction {
    Constant(f64),
    /// `slope·t + intercept`
    Linear {
        slope: f64,
        intercept: f64,
    },
    /// `exp(-(t-center)²/width²) / (width·√π)`
    Gaussian {
        center: f64,
        width: f64,
    },
    /// `t⁵ sin(1/t) e^{-t}`, continued by 0 at `t = 0`.
    SingularSine,
    /// `offset + Σ amplitude·cos(frequency·t + phase)`
    Trig {
        offset: f64,
        modes: Vec<TrigMode>,
    },
    /// Piece `i` is active on `[breaks[i-1], breaks[i])`; the last piece extends to +∞.
    Piecewise {
        breaks: Vec<f64>,
        pieces: Vec<TimeFunction>,
    },
}

impl TimeFunction {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            TimeFunction::Constant(c) => *c,
            TimeFunction::Linear { slope, intercept } => slope * t + intercept,
            TimeFunction::Gaussian { center, width } => {
                let u = (t - center) / width;
                (-u * u).exp() / (width * std::f64::consts::PI.sqrt())
            }
            TimeFunction::SingularSine => {
                if t == 0.0 {
                    0.0
                } else {
                    t.powi(5) * (1.0 / t).sin() * (-t).exp()
                }
            }
            TimeFunction::Trig { offset, modes } => {
                offset
                    + modes
                        .iter()
                        .map(|m| m.amplitude * (m.frequency * t + m.phase).cos())
                        .sum::<f64>()
            }
            TimeFunction::Piecewise { .. } => self.active_piece(t).value(t),
        }
    }

    fn active_piece(&self, t: f64) -> &TimeFunction {
        match self {
            TimeFunction::Piecewise { breaks, pieces } => {
                let idx = breaks.iter().take_while(|&&b| t >= b).count();
                pieces[idx].active_piece(t)
            }
            other => other,
        }
    }

    /// Taylor jet of order `order` at `t`.
    ///
    /// Points where a derivative does not exist yield non-finite coefficients.
    pub fn jet(&self, t: f64, order: usize) -> Jet {
        match self {
            TimeFunction::Constant(c) => Jet::constant(*c, order),
            TimeFunction::Linear { slope, intercept } => Jet::variable(t, order).scale(*slope).offset(*intercept),
            TimeFunction::Gaussian { center, width } => {
                let u = Jet::variable(t, order).offset(-center).scale(1.0 / width);
                (-&(&u * &u)).exp().scale(1.0 / (width * std::f64::consts::PI.sqrt()))
            }
            TimeFunction::SingularSine => {
                if t == 0.0 {
                    // f, f', f'' vanish at the origin; f''' has no limit there.
                    let coeffs = (0..=order).map(|p| if p < 3 { 0.0 } else { f64::NAN }).collect();
                    return Jet::from_coeffs(coeffs);
                }
                let x = Jet::variable(t, order);
                let (s, _) = x.recip().sin_cos();
                let e = (-&x).exp();
                &(&x.powi(5) * &s) * &e
            }
            TimeFunction::Trig { offset, modes } => {
                let x = Jet::variable(t, order);
                let mut acc = Jet::constant(*offset, order);
                for m in modes {
                    let (_, c) = x.scale(m.frequency).offset(m.phase).sin_cos();
                    acc = &acc + &c.scale(m.amplitude);
                }
                acc
            }
            TimeFunction::Piecewise { .. } => self.active_piece(t).jet(t, order),
        }
    }

    /// `f^(p)(t)` for `p = 0..=order`.
    pub fn derivatives(&self, t: f64, order: usize) -> Vec<f64> {
        self.jet(t, order).derivatives()
    }

    /// Jump locations of piecewise functions, sorted.
    pub fn discontinuities(&self) -> Vec<f64> {
        match self {
            TimeFunction::Piecewise { breaks, pieces } => {
                let mut out = breaks.clone();
                for p in pieces {
                    out.extend(p.discontinuities());
                }
                out.sort_by(f64::total_cmp);
                out.dedup();
                out
            }
            _ => Vec::new(),
        }
    }
}
