use thiserror::Error;

/// Errors surfaced by constructors, decompositions and certifiers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {residual:.3e} exceeds tolerance)")]
    NotHermitian { residual: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:.3e} below cutoff {cutoff:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64, cutoff: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} too small, need at least {required}")]
    DimensionTooSmall { dim: usize, required: usize },

    #[error("operand is not normal (commutator residual {residual:.3e})")]
    NotNormal { residual: f64 },

    #[error("operand is not a contraction (largest singular value {sigma_max})")]
    NotContraction { sigma_max: f64 },

    #[error("operand is not semi-hyponormal (order margin {margin:.3e})")]
    NotSemiHyponormal { margin: f64 },

    #[error("matrix is numerically singular (smallest singular value {sigma_min:.3e})")]
    Singular { sigma_min: f64 },

    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("invalid map specification: {0}")]
    InvalidMap(String),

    #[error("invalid suite configuration: {0}")]
    ConfigInvalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
