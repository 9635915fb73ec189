use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The fitness-evaluation budget is spent. Search loops treat this as
    /// their terminal condition rather than as a failure.
    #[error("fitness evaluation budget exhausted after {limit} evaluations")]
    BudgetExhausted { limit: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("degenerate polynomial: leading coefficient is zero")]
    DegeneratePolynomial,
}

impl Error {
    pub fn is_budget_exhausted(&self) -> bool {
        matches!(self, Error::BudgetExhausted { .. })
    }
}
