use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("regime error: {0}")]
    Regime(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid suffix: {0}")]
    InvalidSuffix(String),
    #[error("word too short: {0}")]
    TooShort(String),
    #[error("invalid refinement policy: {0}")]
    Policy(String),
    #[error("interval is not a Stern-Brocot interval: {0}")]
    UnreachableInterval(String),
    #[error("tolerance {tol:e} unreachable: best error bound {best:e}")]
    TolUnreachable { tol: f64, best: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
