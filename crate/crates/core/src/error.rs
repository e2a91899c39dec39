use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("not found: {0}")]
    NotFound(String),

    /// The requested run would exceed the greedy-call budget. Callers should
    /// override `k`, `r` or `delta`, or raise the budget explicitly.
    #[error(
        "greedy-call budget exceeded: run needs {needed} greedy calls but the limit is {limit}; \
         override k/r/delta or raise --budget"
    )]
    BudgetExceeded { needed: u128, limit: u64 },

    #[error("size guard exceeded: {0}")]
    Guard(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn not_found(msg: impl Into<String>) -> Self {
        Error::NotFound(msg.into())
    }

    /// Whether this error stems from a resource guard (budget or size limit)
    /// rather than from malformed input.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::Guard(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
