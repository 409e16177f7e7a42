use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid entropy parameter: {0}")]
    InvalidMeasure(String),

    #[error("invalid qubit state: {0}")]
    InvalidState(String),

    #[error("non-physical mean-value vector: |m| = {0}")]
    NonPhysical(f64),

    #[error("frame is not orthonormal (max deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("matrix is not orthogonal (max |r^T r - I| = {0:e})")]
    NotOrthogonal(f64),

    #[error("map is not sector-stochastic (violation {0:e})")]
    NotSectorStochastic(f64),

    #[error("matrix is not Hermitian (max |rho - rho^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("basis is not orthonormal (max |U^dagger U - I| = {0:e})")]
    NonOrthonormalBasis(f64),

    #[error("post-selection on ({i}, {j}) impossible: branch weight {weight:e}")]
    ZeroBranch { i: usize, j: usize, weight: f64 },

    #[error("integer overflow evaluating {0}")]
    Overflow(String),

    #[error("eigendecomposition failed: {0}")]
    Numerical(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
