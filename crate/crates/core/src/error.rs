use thiserror::Error;

/// Errors raised by planning, execution and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("time {t} outside the interval [{start}, {end}]")]
    OutOfInterval { t: f64, start: f64, end: f64 },

    #[error("index {index} out of range 1..={max}")]
    Index { index: u64, max: u64 },

    #[error("insufficient smoothness data: {0}")]
    InsufficientSmoothness(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("subinterval [{a}, {b}] is shorter than one mesh cell ({cell})")]
    SubintervalTooShort { a: f64, b: f64, cell: f64 },

    #[error("schedule used {r} steps but the a-priori bound is {r_g}")]
    ScheduleOverrun { r: usize, r_g: u64 },

    #[error("schedule is infeasible: {0}")]
    Infeasible(String),

    #[error("reference integration failed: achieved error estimate {achieved:e} > tolerance {tol:e}")]
    ToleranceUnreachable { achieved: f64, tol: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
