use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A demand/kernel/welfare specification that cannot be constructed.
    #[error("invalid specification: {0}")]
    Spec(String),

    /// Minimal-income consistency violated: C would not vanish correctly at x = 1.
    #[error("inconsistent config: minimal-income residual {residual:.3e} exceeds {tol:.1e}")]
    Inconsistent { residual: f64, tol: f64 },

    /// An integral with no finite value for the requested parameters.
    #[error("divergent integral: {0}")]
    Divergent(String),

    /// Moment m_a requested at or beyond the kernel's divergence threshold.
    #[error("moment m_a diverges at a = {a} (threshold {threshold})")]
    DivergentMoment { a: f64, threshold: f64 },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature stalled: error {err:.3e} after {intervals} intervals")]
    Quadrature { err: f64, intervals: usize },

    /// Root finder called without a sign change on the bracket.
    #[error("root not bracketed in [{lo}, {hi}]")]
    NotBracketed { lo: f64, hi: f64 },

    /// Fixed-point sweep residual grew over many consecutive iterations.
    #[error("iteration diverged: residual grew over {0} consecutive sweeps; history tail {1:?}")]
    Diverged(usize, Vec<f64>),

    /// An operation that requires a converged solution got a non-converged one.
    #[error("solution not converged (residual {residual:.3e} after {iterations} sweeps)")]
    NotConverged { iterations: usize, residual: f64 },

    /// Dense eigenvalue decomposition did not converge.
    #[error("eigenvalue decomposition failed")]
    EigenFailed,

    /// A stated precondition of a lemma/operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Declarative config text could not be parsed.
    #[error("config parse error (line {line}): {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
