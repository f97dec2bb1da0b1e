use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("enumeration cap exceeded: n = {n} > {cap} ({what})")]
    Capacity { n: usize, cap: usize, what: String },

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("system is infeasible: {0}")]
    Infeasible(String),

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
