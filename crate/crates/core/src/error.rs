use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("duplicate sample point at indices {first} and {second}")]
    DuplicatePoint { first: usize, second: usize },

    #[error("extreme point sets are empty")]
    EmptyExtremeSets,

    #[error("operation supports dimension 1 only, got {0}")]
    UnsupportedDimension(usize),

    #[error("linear program failure: {0}")]
    Lp(String),
}
