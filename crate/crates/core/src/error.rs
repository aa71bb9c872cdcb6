use thiserror::Error;

/// Errors raised by the verification library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QcError {
    #[error("quaternionic dimension must be at least {min}, got {got}")]
    Dimension { min: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Mismatch { expected: usize, got: usize },

    #[error("structure index s must be 1, 2 or 3, got {0}")]
    StructureIndex(usize),

    #[error("rate mismatch: {0} vs {1}")]
    RateMismatch(String, String),

    #[error("decay rate must be positive, got {0}")]
    NonPositiveRate(String),

    #[error("sample count {got} below minimum {min}")]
    SampleCount { min: usize, got: usize },

    #[error("point is not on the unit sphere (|x|^2 = {0})")]
    OffSphere(f64),

    #[error("near-singular pivot while building horizontal frame (residual {0:e})")]
    SingularPivot(f64),

    #[error("route disagreement {diff:e} exceeds {tol:e}")]
    RouteDisagreement { diff: f64, tol: f64 },

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, QcError>;
