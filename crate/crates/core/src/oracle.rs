//! Bit-level emulation of the column-position and matrix-value oracles over a
//! discretized time mesh, with query bookkeeping.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianTerm;

/// Largest supported time register.
pub const MAX_TIME_BITS: u32 = 62;
/// Largest supported value register (two halves of at most 31 bits each).
pub const MAX_VALUE_QUBITS: u32 = 62;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// `n′`
    pub time_bits: u32,
    /// `n″`, even
    pub value_qubits: u32,
    pub h_max: f64,
    pub t0: f64,
    pub total_span: f64,
}

impl OracleConfig {
    pub fn new(time_bits: u32, value_qubits: u32, h_max: f64, t0: f64, total_span: f64) -> Result<Self> {
        if time_bits == 0 || time_bits > MAX_TIME_BITS {
            return Err(Error::InvalidInput(format!(
                "time_bits must be in 1..={MAX_TIME_BITS}, got {time_bits}"
            )));
        }
        if value_qubits == 0 || !value_qubits.is_multiple_of(2) || value_qubits > MAX_VALUE_QUBITS {
            return Err(Error::InvalidInput(format!(
                "value_qubits must be even and in 2..={MAX_VALUE_QUBITS}, got {value_qubits}"
            )));
        }
        if !(h_max > 0.0) || !(total_span > 0.0) {
            return Err(Error::InvalidInput("h_max and total_span must be positive".into()));
        }
        Ok(Self {
            time_bits,
            value_qubits,
            h_max,
            t0,
            total_span,
        })
    }

    /// Number of mesh points `2^{n′}`.
    pub fn mesh_len(&self) -> u64 {
        1u64 << self.time_bits
    }

    /// Mesh spacing `σ = Δt / 2^{n′}`.
    pub fn cell(&self) -> f64 {
        self.total_span / self.mesh_len() as f64
    }

    /// Bits per half of the value register, `n″/2`.
    pub fn half_bits(&self) -> u32 {
        self.value_qubits / 2
    }
}

/// Running totals of oracle and transform usage for one simulation run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryLedger {
    column_bit_queries: u64,
    value_bit_queries: u64,
    transform_calls: u64,
    exponentials: u64,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn column_bit_queries(&self) -> u64 {
        self.column_bit_queries
    }

    pub fn value_bit_queries(&self) -> u64 {
        self.value_bit_queries
    }

    pub fn transform_calls(&self) -> u64 {
        self.transform_calls
    }

    /// One-sparse exponentials applied.
    pub fn exponentials(&self) -> u64 {
        self.exponentials
    }

    /// Column plus value bit queries.
    pub fn oracle_queries(&self) -> u64 {
        self.column_bit_queries + self.value_bit_queries
    }

    pub(crate) fn charge_columns(&mut self, n: u64) {
        self.column_bit_queries += n;
    }

    pub(crate) fn charge_values(&mut self, n: u64) {
        self.value_bit_queries += n;
    }

    pub(crate) fn charge_transform(&mut self) {
        self.transform_calls += 1;
    }

    pub(crate) fn record_exponential(&mut self) {
        self.exponentials += 1;
    }
}

fn ceil_log2(x: f64) -> i64 {
    x.log2().ceil() as i64
}

/// `(n′, n″)` sufficient to keep round-off below `ε/2`.
///
/// Results are clamped to at least one time bit and two value qubits.
pub fn precision_requirements(
    k: u32,
    m: usize,
    d: usize,
    dt: f64,
    eps: f64,
    max_dh: f64,
    h_max: f64,
) -> Result<(u32, u32)> {
    if !(eps > 0.0) || eps > 1.0 {
        return Err(Error::Domain(format!("ε must be in (0, 1], got {eps}")));
    }
    if k == 0 || m == 0 || d == 0 || !(dt > 0.0) || !(max_dh > 0.0) || !(h_max > 0.0) {
        return Err(Error::Domain("precision inputs must be positive".into()));
    }
    let base = 32.0 * k as f64 * m as f64 * (d * d) as f64 * (5.0_f64 / 3.0).powi(k as i32 - 1);
    let n1 = ceil_log2(max_dh * base * dt * dt / eps).max(1);
    let n2 = (2 * ceil_log2(base * h_max * dt / eps) + 6).max(2);
    if n1 > MAX_TIME_BITS as i64 || n2 > MAX_VALUE_QUBITS as i64 {
        return Err(Error::Domain(format!(
            "required precision (n′={n1}, n″={n2}) exceeds register limits"
        )));
    }
    Ok((n1 as u32, n2 as u32))
}

/// `t_q = t0 + (q − 1/2)·Δt/2^{n′}` for `1 ≤ q ≤ 2^{n′}`.
pub fn mesh_time(q: u64, config: &OracleConfig) -> Result<f64> {
    if q == 0 || q > config.mesh_len() {
        return Err(Error::Index {
            index: q,
            max: config.mesh_len(),
        });
    }
    Ok(config.t0 + (q as f64 - 0.5) * config.cell())
}

/// Index of the mesh point inside `[a, b]` closest to `tau`.
pub fn round_time(tau: f64, window: (f64, f64), config: &OracleConfig) -> Result<u64> {
    let (a, b) = window;
    let cell = config.cell();
    if b - a < cell {
        return Err(Error::SubintervalTooShort { a, b, cell });
    }
    let to_index = |t: f64| (t - config.t0) / cell + 0.5;
    let len = config.mesh_len() as f64;
    let mut lo = to_index(a).ceil().clamp(1.0, len) as u64;
    let mut hi = to_index(b).floor().clamp(1.0, len) as u64;
    // Guard against the index arithmetic disagreeing with mesh_time by an ulp.
    while lo < hi && mesh_time(lo, config)? < a {
        lo += 1;
    }
    while hi > lo && mesh_time(hi, config)? > b {
        hi -= 1;
    }
    let nearest = to_index(tau).round().clamp(lo as f64, hi as f64) as u64;
    Ok(nearest)
}

/// Polar bit strings of one matrix element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolarCode {
    /// Modulus bits `ρ₁ρ₂…`, most significant first.
    pub rho_bits: u64,
    /// Phase bits over `[0, 2π)`, most significant first.
    pub phi_bits: u64,
    pub half_bits: u32,
}

impl PolarCode {
    /// Truncates `z` to `half_bits` modulus bits (scaled by `h_max`) and phase bits.
    pub fn encode(z: Complex64, h_max: f64, half_bits: u32) -> Result<Self> {
        let scale = (1u64 << half_bits) as f64;
        let rho = z.norm();
        if rho > h_max * (1.0 + 1e-12) {
            return Err(Error::Contract(format!("element modulus {rho} exceeds h_max {h_max}")));
        }
        let top = (1u64 << half_bits) - 1;
        let rho_bits = ((rho / h_max * scale).floor() as u64).min(top);
        let phi_bits = if rho == 0.0 {
            0
        } else {
            let phi = z.arg().rem_euclid(TAU);
            let bits = (phi / TAU * scale).floor() as u64;
            if bits > top {
                0
            } else {
                bits
            }
        };
        Ok(Self {
            rho_bits,
            phi_bits,
            half_bits,
        })
    }

    /// `(ρ̃, φ̃)`.
    pub fn decode(&self, h_max: f64) -> (f64, f64) {
        let scale = (1u64 << self.half_bits) as f64;
        (h_max * self.rho_bits as f64 / scale, TAU * self.phi_bits as f64 / scale)
    }
}

/// Reads the polar code of `H_α(t_q)_{xy}` without touching any ledger.
pub(crate) fn read_polar(
    term: &HamiltonianTerm,
    x: usize,
    y: usize,
    q: u64,
    config: &OracleConfig,
) -> Result<(f64, f64)> {
    let t = mesh_time(q, config)?;
    if !term.pattern().contains(x, y) {
        return Ok((0.0, 0.0));
    }
    let code = PolarCode::encode(term.element(x, y, t), config.h_max, config.half_bits())?;
    Ok(code.decode(config.h_max))
}

/// One read of the value oracle: `(ρ̃, φ̃)` of `H_α(t_q)_{xy}`, charging `n″` bit queries.
///
/// Positions outside the pattern read as zero but are charged in full.
pub fn matrix_value_polar(
    term: &HamiltonianTerm,
    x: usize,
    y: usize,
    q: u64,
    config: &OracleConfig,
    ledger: &mut QueryLedger,
) -> Result<(f64, f64)> {
    ledger.charge_values(config.value_qubits as u64);
    read_polar(term, x, y, q, config)
}

/// Bit `p` (least significant first) of the `i`-th column of row `x`, charging one query.
///
/// Rows with fewer than `i + 1` entries are padded with their own index.
pub fn column_index_bit(term: &HamiltonianTerm, x: usize, i: usize, p: u32, ledger: &mut QueryLedger) -> Result<bool> {
    let dim = term.dim();
    let qubits = dim.trailing_zeros();
    let d = term.pattern().degree()?;
    if x >= dim {
        return Err(Error::Index {
            index: x as u64,
            max: dim as u64 - 1,
        });
    }
    if i >= d {
        return Err(Error::Index {
            index: i as u64,
            max: d as u64 - 1,
        });
    }
    if p >= qubits {
        return Err(Error::Index {
            index: p as u64,
            max: qubits as u64 - 1,
        });
    }
    ledger.charge_columns(1);
    let col = term.pattern().row(x).get(i).copied().unwrap_or(x);
    Ok((col >> p) & 1 == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{Component, TimeFunction};
    use crate::linalg::{c, CMatrix};

    fn config(n1: u32, n2: u32) -> OracleConfig {
        OracleConfig::new(n1, n2, 1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn precision_examples() {
        assert_eq!(precision_requirements(1, 1, 1, 1.0, 0.01, 1.0, 1.0).unwrap(), (12, 30));
        assert!(matches!(
            precision_requirements(1, 1, 1, 1.0, 0.0, 1.0, 1.0),
            Err(Error::Domain(_))
        ));
        // 32·2·(5/3)·4·10/1e-4 = 4.2667e7 → 26; 32·2·(5/3)·2/1e-4 = 2.1333e6 → 2·22+6
        assert_eq!(precision_requirements(2, 1, 1, 2.0, 1e-4, 10.0, 1.0).unwrap(), (26, 50));
    }

    #[test]
    fn mesh_examples() {
        assert_eq!(mesh_time(1, &config(1, 8)).unwrap(), 0.25);
        let cfg = OracleConfig::new(5, 8, 1.0, 0.3, 2.0).unwrap();
        let last = mesh_time(32, &cfg).unwrap();
        assert!((last - (0.3 + 2.0 * (1.0 - 2f64.powi(-6)))).abs() < 1e-15);
        assert!(matches!(mesh_time(0, &cfg), Err(Error::Index { .. })));
        assert!(matches!(mesh_time(33, &cfg), Err(Error::Index { .. })));
    }

    #[test]
    fn rounding_examples() {
        let cfg = config(4, 8);
        let t5 = mesh_time(5, &cfg).unwrap();
        assert_eq!(round_time(t5, (0.0, 1.0), &cfg).unwrap(), 5);
        // window [0.25, 0.4]: in-range points are q=5,6 (0.28125, 0.34375); τ=0.399 is nearest q=7
        let q = round_time(0.399, (0.25, 0.4), &cfg).unwrap();
        assert_eq!(q, 6);
        assert!(matches!(
            round_time(0.3, (0.3, 0.35), &cfg),
            Err(Error::SubintervalTooShort { .. })
        ));
    }

    #[test]
    fn polar_examples() {
        let half = PolarCode::encode(c(0.5, 0.0), 1.0, 4).unwrap();
        assert_eq!((half.rho_bits, half.phi_bits), (0b1000, 0));
        let zero = PolarCode::encode(c(0.0, 0.0), 1.0, 4).unwrap();
        assert_eq!(zero.decode(1.0), (0.0, 0.0));
        let neg = PolarCode::encode(c(-0.25, 0.0), 1.0, 4).unwrap();
        assert_eq!(neg.decode(1.0), (0.25, std::f64::consts::PI));
        assert!(PolarCode::encode(c(2.0, 0.0), 1.0, 4).is_err());
    }

    #[test]
    fn column_bits_and_charges() {
        let mut m = CMatrix::zeros(8, 8);
        m[(2, 5)] = c(1.0, 0.0);
        m[(5, 2)] = c(1.0, 0.0);
        let term = HamiltonianTerm::new(
            vec![Component {
                coefficient: TimeFunction::Constant(1.0),
                matrix: m,
            }],
            None,
            (0.0, 1.0),
        )
        .unwrap();
        let mut ledger = QueryLedger::new();
        assert!(column_index_bit(&term, 2, 0, 0, &mut ledger).unwrap());
        let mut col = 0;
        for p in 0..3 {
            if column_index_bit(&term, 2, 0, p, &mut ledger).unwrap() {
                col |= 1 << p;
            }
        }
        assert_eq!(col, 5);
        assert_eq!(ledger.column_bit_queries(), 4);
        // Row 0 is empty: padding repeats the row index.
        for p in 0..3 {
            assert!(!column_index_bit(&term, 0, 0, p, &mut ledger).unwrap());
        }
        assert!(column_index_bit(&term, 2, 1, 0, &mut ledger).is_err());

        let cfg = config(4, 8);
        let before = ledger.value_bit_queries();
        let (rho, _) = matrix_value_polar(&term, 0, 1, 3, &cfg, &mut ledger).unwrap();
        assert_eq!(rho, 0.0);
        assert_eq!(ledger.value_bit_queries() - before, 8);
    }
}
