use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A field size or parameter combination the crate does not support.
    #[error("configuration error: {0}")]
    Config(String),

    /// An enumeration would exceed the configured budget.
    #[error("budget exceeded: {what} needs {requested} items (estimate {estimate}, budget {budget})")]
    Budget {
        what: String,
        requested: BigUint,
        estimate: BigUint,
        budget: u64,
    },

    /// Two routes that must agree did not. Always indicates a bug.
    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("malformed report: {0}")]
    Report(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
