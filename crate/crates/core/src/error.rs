use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("dimension {got} out of range (allowed {lo}..={hi})")]
    DimOutOfRange { got: usize, lo: usize, hi: usize },
    #[error("complex is not pure")]
    NotPure,
    #[error("invalid gluing: {0}")]
    InvalidGluing(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("singular point: {0}")]
    Singular(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix order {order} exceeds budget {limit} (set SIMSPEC_MAX_ORDER to raise it)")]
    Budget { order: usize, limit: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("rational overflow")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, Error>;
