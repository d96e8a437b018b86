use thiserror::Error;

/// Errors produced by the eigenvalue optimizers and their building blocks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dense eigensolver failed to converge at omega = {omega:?}")]
    EigenNonConvergence { omega: Vec<f64> },

    #[error("matrix is not Hermitian: max |A - A*| = {deviation:e} at omega = {omega:?}")]
    NotHermitian { omega: Vec<f64>, deviation: f64 },

    #[error("eigenvalue index {index} out of range for matrix of order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("eigenvalue gap {gap:e} below {threshold:e}: second derivative is ill-defined near a crossing")]
    NearDegenerate { gap: f64, threshold: f64 },

    #[error("singular value is zero; use the Hermitian embedding directly")]
    ZeroSingularValue,

    #[error("objective returned a non-finite value {value} at {point:?}")]
    NonFinite { point: Vec<f64>, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported domain dimension {0}; only d = 1 and d = 2 are supported")]
    UnsupportedDimension(usize),

    #[error("all sampled points were near-degenerate; supply gamma explicitly")]
    GammaEstimationFailed,

    #[error("system matrix A is not stable (max real part of spectrum {max_real_part})")]
    UnstableSystem { max_real_part: f64 },

    #[error("inner maximization over the coupling parameter did not converge at lambda = {lambda:?}")]
    InnerNonConvergence { lambda: Vec<f64> },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
