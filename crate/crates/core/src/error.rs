use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {index} is outside the domain of size {domain_size}")]
    DomainMismatch { index: usize, domain_size: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("sample length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("enumeration of {requested} items exceeds the cap of {cap}")]
    EnumerationTooLarge { requested: u128, cap: u128 },

    #[error("invalid budget: {0}")]
    InvalidBudget(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("brute-force scope exceeded: {0}")]
    ScopeExceeded(String),

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("no F evaluation available at bias {0}")]
    MissingEvaluation(String),

    #[error("adversary {adversary} changed {changed} examples, budget allows {allowed}")]
    BudgetViolation {
        adversary: String,
        changed: usize,
        allowed: usize,
    },

    #[error("construction failed: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
