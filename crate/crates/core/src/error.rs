use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch { context: &'static str, expected: usize, got: usize },

    #[error("non-finite entry at flat index {index}")]
    NonFinite { index: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Sign enumeration would need more free bits than the configured guard allows.
    #[error("enumeration too large: needs {bits} sign bits, guard limit is {limit}")]
    TooLarge { bits: u32, limit: u32 },

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("simplex iteration cap of {0} pivots exceeded")]
    CycleGuard(usize),

    #[error("singular basis encountered during refactorization")]
    SingularBasis,

    /// The dual functional is too large for exact enumeration and no analytic norm was supplied.
    #[error("no dual norm available for the functional (exceeds guard of {limit} bits); supply an analytic bound")]
    MissingDualNorm { limit: u32 },
}
