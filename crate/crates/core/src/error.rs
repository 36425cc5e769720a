//! Error type shared across the crate.

/// Errors produced by matrix construction, decomposition, distribution
/// validation and the solver runners.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("symmetry violation at ({i}, {j}): |a[{i}][{j}] - a[{j}][{i}]| = {delta:e}")]
    NotSymmetric { i: usize, j: usize, delta: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("eigendecomposition did not converge within {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },

    #[error("matrix is not orthogonal: max |QᵀQ - I| = {delta:e}")]
    NotOrthogonal { delta: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate basis: vector {index} has A-norm {norm:e} after orthogonalization")]
    DegenerateBasis { index: usize, norm: f64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("distribution is not proper: lambda_min(E[H]) = {lambda_min:e}")]
    ImproperDistribution { lambda_min: f64 },

    #[error("degenerate direction: sᵀAs = {value:e}")]
    DegenerateDirection { value: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
