use thiserror::Error;

/// Errors raised by the geometric kernels, the dynamics and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("metric is not positive definite at {point:?}")]
    DegenerateMetric { point: Vec<f64> },

    #[error("point {point:?} lies inside the obstacle (clearance {clearance:.3e} <= guard {guard:.1e})")]
    ObstaclePenetration { point: Vec<f64>, clearance: f64, guard: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("integration produced a non-finite state at t = {t}")]
    NonFinite { t: f64 },

    #[error("newton iteration did not converge after {iterations} iterations (best residual {best_residual:.3e})")]
    NonConvergence { iterations: usize, best_residual: f64 },

    #[error("inconsistent initial data: {0}")]
    Initialization(String),

    #[error("invalid scenario: {0}")]
    Validation(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
