use thiserror::Error;

/// Errors surfaced by the library. The CLI maps these onto distinct exit
/// codes (see the binary's documentation).
#[derive(Debug, Error)]
pub enum Error {
    #[error("adaptive quadrature exceeded depth limit on [{a}, {b}] before reaching tol {tol:e}")]
    QuadratureNonConvergence { a: f64, b: f64, tol: f64 },

    #[error(
        "g_M passes within {min_ratio:e} of zero relative to its maximum on the line Im = c; \
         the line is too close to a complex zero of f^2, retry with a different c"
    )]
    NearZeroOnLine { min_ratio: f64 },

    #[error("sampling rate s = {s} must exceed twice the bandwidth, 2b = {double_b}")]
    InvalidRate { s: f64, double_b: f64 },

    #[error("result grid does not cover the requested error interval [{lo}, {hi}]")]
    DomainMismatch { lo: i64, hi: i64 },

    #[error("signal specification is empty")]
    EmptySpec,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
