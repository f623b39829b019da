//! Closed-form query and exponential counts, and the report that sets them
//! beside measured ledger totals.

use serde::Serialize;

use crate::error::{Error, Result};

const FIVE_THIRDS: f64 = 5.0 / 3.0;

/// `⌈2 log₂ z⌉` computed exactly as the least `m` with `2^m ≥ z²`.
fn ceil_two_log2(z: u64) -> u64 {
    let sq = (z as u128) * (z as u128);
    if sq <= 1 {
        0
    } else {
        (128 - (sq - 1).leading_zeros()) as u64
    }
}

/// Iterations of `z ↦ ⌈2 log₂ z⌉` from `n` until the value is at most 6.
pub fn z_chain(n: u64) -> u32 {
    let mut z = n;
    let mut count = 0;
    while z > 6 {
        z = ceil_two_log2(z);
        count += 1;
    }
    count
}

/// Column-oracle queries per one-sparse exponential, `4n(z_n + 2)`.
pub fn column_query_charge(n: u64) -> u64 {
    4 * n * (z_chain(n) as u64 + 2)
}

/// `C = 4n(z_n + 2) + 3n″`.
pub fn one_sparse_query_cost(n: u64, value_qubits: u32) -> u64 {
    column_query_charge(n) + 3 * value_qubits as u64
}

fn ceil_u64(x: f64) -> u64 {
    if x.is_finite() {
        x.ceil().max(0.0) as u64
    } else {
        u64::MAX
    }
}

/// `12Md²5^{k−1}·⌈24kd²ΛΔt(5/3)^k (6d²ΛΔt/(ε̃/2))^{1/2k}⌉` with
/// `ε̃ = min{ε, 18(5/3)^{k−1}d²ΛΔt}`.
pub fn constant_step_exp_bound(k: u32, m: usize, d: usize, lambda: f64, dt: f64, eps: f64) -> u64 {
    let (kf, d2) = (k as f64, (d * d) as f64);
    let ld = lambda * dt;
    let tilde = eps.min(18.0 * FIVE_THIRDS.powi(k as i32 - 1) * d2 * ld);
    let inner =
        24.0 * kf * d2 * ld * FIVE_THIRDS.powi(k as i32) * (6.0 * d2 * ld / (tilde / 2.0)).powf(1.0 / (2.0 * kf));
    12 * m as u64 * (d * d) as u64 * 5u64.pow(k - 1) * ceil_u64(inner)
}

/// `C` times [`constant_step_exp_bound`].
pub fn constant_step_oracle_bound(k: u32, m: usize, d: usize, lambda: f64, dt: f64, eps: f64, c: u64) -> u64 {
    c.saturating_mul(constant_step_exp_bound(k, m, d, lambda, dt, eps))
}

/// Exponential count for a run with `jumps` excised discontinuities:
/// `12Md²5^{k−1}[(L+1) + 24kd²ΛΔt(5/3)^k(6d²ΛΔt/(ε/3))^{1/2k}]`, rounded up.
pub fn piecewise_exp_bound(k: u32, m: usize, d: usize, lambda: f64, dt: f64, eps: f64, jumps: usize) -> u64 {
    let (kf, d2) = (k as f64, (d * d) as f64);
    let ld = lambda * dt;
    let inner = (jumps + 1) as f64
        + 24.0 * kf * d2 * ld * FIVE_THIRDS.powi(k as i32) * (6.0 * d2 * ld / (eps / 3.0)).powf(1.0 / (2.0 * kf));
    ceil_u64(12.0 * m as f64 * d2 * 5f64.powi(k as i32 - 1) * inner)
}

/// `12CMd²5^{k−1}·⌈[24d²k(5/3)^{k−1}ῩΔt]^{1+1/2k}/(ε/4)^{1/2k} + 3K²ῩΔt + 1⌉`
/// without the factor `C`.
pub fn adaptive_exp_bound(k: u32, m: usize, d: usize, mean_dt: f64, eps: f64, growth: f64) -> u64 {
    let (kf, d2) = (k as f64, (d * d) as f64);
    let base = 24.0 * d2 * kf * FIVE_THIRDS.powi(k as i32 - 1) * mean_dt;
    let inner =
        base.powf(1.0 + 1.0 / (2.0 * kf)) / (eps / 4.0).powf(1.0 / (2.0 * kf)) + 3.0 * growth * growth * mean_dt + 1.0;
    12 * m as u64 * (d * d) as u64 * 5u64.pow(k - 1) * ceil_u64(inner)
}

pub fn adaptive_oracle_bound(k: u32, m: usize, d: usize, mean_dt: f64, eps: f64, growth: f64, c: u64) -> u64 {
    c.saturating_mul(adaptive_exp_bound(k, m, d, mean_dt, eps, growth))
}

/// `k₀ = ⌈√(½ log_{25/3}(d²ῩΔt/ε))⌉`, at least 1.
pub fn near_linear_k(d: usize, mean_dt: f64, eps: f64) -> Result<u32> {
    if !(eps > 0.0) || !(mean_dt >= 0.0) {
        return Err(Error::Domain("near-linear order needs ε > 0 and ῩΔt ≥ 0".into()));
    }
    let arg = (d * d) as f64 * mean_dt / eps;
    if arg <= 1.0 {
        return Ok(1);
    }
    let k = (0.5 * arg.ln() / (25.0_f64 / 3.0).ln()).sqrt().ceil();
    Ok((k as u32).max(1))
}

/// Iterated base-2 logarithm: applications of `log₂` until the value is ≤ 1.
pub fn log_star(n: f64) -> u32 {
    let mut x = n;
    let mut count = 0;
    while x > 1.0 {
        x = x.log2();
        count += 1;
    }
    count
}

/// `n (log* n)²`, reported for information only.
pub fn space_estimate(n: u64) -> u64 {
    let l = log_star(n as f64) as u64;
    n * l * l
}

/// Closed-form counts of a planned simulation next to what was measured.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub k: u32,
    pub terms: usize,
    pub d: usize,
    /// `6Md²`
    pub m_bound: usize,
    pub m_actual: usize,
    pub r: u64,
    pub r_g: Option<u64>,
    pub time_bits: u32,
    pub value_qubits: u32,
    pub c: u64,
    pub n_exp_formula: u64,
    pub n_exp_actual: u64,
    pub n_oracle_formula: u64,
    pub n_oracle_measured: Option<u64>,
    pub n_t_formula: u64,
    pub n_t_actual: u64,
    pub n_t_measured: Option<u64>,
    pub k_star: u32,
    pub space_estimate: u64,
}

impl CostReport {
    /// Checks the relations every executed run must satisfy; returns the
    /// first violated one.
    pub fn reconcile(&self) -> std::result::Result<(), String> {
        if self.n_exp_actual > self.n_exp_formula {
            return Err(format!(
                "exponentials {} exceed the bound {}",
                self.n_exp_actual, self.n_exp_formula
            ));
        }
        if self.n_oracle_formula != self.c.saturating_mul(self.n_exp_formula) {
            return Err("oracle bound is not C times the exponential bound".into());
        }
        if let Some(q) = self.n_oracle_measured {
            if q > self.n_oracle_formula {
                return Err(format!(
                    "measured queries {q} exceed the bound {}",
                    self.n_oracle_formula
                ));
            }
        }
        if let Some(t) = self.n_t_measured {
            let limit = self.n_exp_actual as f64 / (3 * self.d * self.d) as f64 + 1.0;
            if t as f64 > limit {
                return Err(format!("transform calls {t} exceed {limit}"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_chain_examples() {
        assert_eq!(z_chain(6), 0);
        assert_eq!(z_chain(100), 3);
        assert_eq!(z_chain(8), 1);
        assert_eq!(z_chain(4), 0);
        assert_eq!(z_chain(1), 0);
        assert_eq!(ceil_two_log2(8), 6);
        assert_eq!(ceil_two_log2(100), 14);
    }

    #[test]
    fn query_cost_examples() {
        assert_eq!(one_sparse_query_cost(4, 30), 122);
        assert_eq!(one_sparse_query_cost(100, 30), 2090);
        assert_eq!(one_sparse_query_cost(4, 0), 32);
    }

    #[test]
    fn constant_bound_example() {
        assert_eq!(constant_step_exp_bound(1, 1, 1, 1.0, 1.0, 0.01), 12 * 1386);
        assert_eq!(
            constant_step_oracle_bound(1, 1, 1, 1.0, 1.0, 0.01, 122),
            12 * 122 * 1386
        );
    }

    #[test]
    fn near_linear_examples() {
        assert_eq!(near_linear_k(1, 25.0 / 3.0, 1.0).unwrap(), 1);
        assert_eq!(near_linear_k(1, 1e8, 1.0).unwrap(), 3);
        assert_eq!(near_linear_k(1, 0.5, 1.0).unwrap(), 1);
    }

    #[test]
    fn log_star_values() {
        assert_eq!(log_star(1.0), 0);
        assert_eq!(log_star(2.0), 1);
        assert_eq!(log_star(16.0), 3);
        assert_eq!(log_star(65536.0), 4);
        assert_eq!(space_estimate(16), 16 * 9);
    }
}
