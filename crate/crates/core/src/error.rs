use thiserror::Error;

use crate::ese::wire::WireError;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An operand or argument violates an operation's precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Scheme parameters are out of range. `bound` names the violated constraint.
    #[error("parameter error ({bound}): {detail}")]
    Parameter { bound: &'static str, detail: String },

    /// Unknown backend, method or other configuration value.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Wire(#[from] WireError),

    /// Exhaustive enumeration would exceed the configured budget.
    #[error("enumeration budget exceeded: {required} terms required, budget is {budget}")]
    Budget { required: u128, budget: u128 },

    /// A mathematical domain condition failed (e.g. support domination).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("entropy source failure: {0}")]
    Entropy(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
