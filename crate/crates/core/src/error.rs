use thiserror::Error;

use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bundle {mask:#x} uses goods outside the ground set of size {m}")]
    BundleOutOfRange { mask: u64, m: usize },

    #[error("m = {m} exceeds the exact enumeration cap of {cap} goods; use sampling instead")]
    ExactCapExceeded { m: usize, cap: usize },

    #[error("{what}: {needed} exceeds the budget of {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: String,
        budget: String,
    },

    #[error("quantile level must lie in (0, 1], got {0}")]
    QuantileDomain(Rational),

    #[error("{op} does not support {variant} valuations")]
    UnsupportedValuation {
        op: &'static str,
        variant: &'static str,
    },

    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid matroid: {0}")]
    InvalidMatroid(String),

    #[error("ground sets differ: {0} vs {1}")]
    GroundMismatch(usize, usize),

    #[error("integer overflow while {0}")]
    Overflow(&'static str),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("veto list is not monotonicity-consistent: {0}")]
    InconsistentVetoList(String),

    #[error("unknown named instance `{0}`")]
    UnknownInstance(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Refusals caused by size caps rather than by bad input.
    pub fn is_budget_refusal(&self) -> bool {
        matches!(
            self,
            Error::ExactCapExceeded { .. } | Error::BudgetExceeded { .. }
        )
    }

    pub(crate) fn budget(what: &'static str, needed: impl ToString, budget: impl ToString) -> Self {
        Error::BudgetExceeded {
            what,
            needed: needed.to_string(),
            budget: budget.to_string(),
        }
    }
}
