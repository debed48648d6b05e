use crate::grouping::GroupingReport;

/// Errors raised by the optimizers and problem builders.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("non-finite value {value} in {what} at index {index}")]
    NumericInput {
        what: &'static str,
        index: usize,
        value: f64,
    },

    #[error("non-finite position for agent {agent} in dimension {dimension}")]
    NumericFailure { agent: usize, dimension: usize },

    #[error("evaluation budget of {budget} exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("evaluation budget exhausted during grouping after {} evaluations", .partial.evaluations_used)]
    GroupingIncomplete { partial: GroupingReport },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}
