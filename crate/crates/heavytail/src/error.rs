//! Error type shared by all modules.

/// Errors produced by samplers, quadrature and statistics.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A scalar or vector parameter is outside its admissible range.
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),

    /// A matrix expected to be symmetric is not, beyond rounding.
    #[error("matrix is not symmetric (max |a_ij - a_ji| = {max_asymmetry:.3e})")]
    NotSymmetric { max_asymmetry: f64 },

    /// Cholesky factorization hit a non-positive pivot.
    #[error("matrix is not positive definite (pivot {pivot:.3e} at column {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    /// Vector/matrix dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A statistic was requested on an empty sample.
    #[error("empty sample")]
    EmptySample,

    /// Adaptive quadrature exhausted its subdivision budget before the
    /// requested tolerance was met.
    #[error(
        "quadrature did not converge: error estimate {error_estimate:.3e} \
         after {subdivisions} subdivisions"
    )]
    QuadratureDidNotConverge {
        error_estimate: f64,
        subdivisions: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
