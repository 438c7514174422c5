use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("no convergence: {0}")]
    NumericalTolerance(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("fixture invalid: {0}")]
    FixtureInvalid(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
