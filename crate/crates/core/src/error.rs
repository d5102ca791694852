use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model parameter lies outside its admissible range.
    #[error("invalid {name} = {value}: {bound}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        bound: &'static str,
    },

    #[error("could not parse probability {input:?}: {reason}")]
    Parse { input: String, reason: String },

    /// A formula was requested outside the regime where it is defined.
    #[error("{0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The ensemble would exceed the configured total step budget.
    #[error("requested {requested} steps exceeds the step budget of {budget}")]
    BudgetExceeded { requested: u128, budget: u64 },

    #[error("exact enumeration at n = {n}, d = {dim} exceeds the budget (max n = {max_n})")]
    EnumerationBudget { n: u64, dim: usize, max_n: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
