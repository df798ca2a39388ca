use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Exhaustive enumeration would visit more profiles than the caller
    /// allowed; signals that the heuristic path should be used instead.
    #[error("enumeration needs {required:.3e} profiles, budget is {budget}")]
    BudgetExceeded { required: f64, budget: u64 },

    #[error("threshold is not positive (tau = {0}); bound is vacuous")]
    VacuousBound(f64),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
