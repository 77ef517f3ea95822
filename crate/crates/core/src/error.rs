use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not an association scheme: {0}")]
    NotAScheme(String),

    #[error("multi-index {index} has weight {found}, expected {expected}")]
    WeightMismatch {
        index: String,
        found: usize,
        expected: usize,
    },

    #[error("matrix of order {requested} exceeds size guard {guard}")]
    SizeGuard { requested: usize, guard: usize },

    #[error("linear system is singular")]
    Singular,

    #[error("weight solution does not reproduce the target phases (residual {0:e})")]
    RoundTrip(f64),

    #[error("matrix is not Hermitian (residual {0:e})")]
    NotHermitian(f64),

    #[error("parameter relation nu*P*U*P~*U^dagger = I violated (residual {0:e})")]
    ParamsInvariant(f64),

    #[error("profile is not normalized (total probability {0})")]
    NotNormalized(f64),

    #[error("index out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
