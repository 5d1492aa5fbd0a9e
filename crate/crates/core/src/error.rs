use thiserror::Error;

/// Errors raised by the simulation, inference and IO layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution parameter: {0}")]
    DistributionParameter(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value {value} outside of domain: {what}")]
    Domain { what: &'static str, value: f64 },

    #[error("time {t} beyond trajectory coverage [0, {covered})")]
    OutOfRange { t: f64, covered: f64 },

    #[error("assignment problem of size {k} exceeds limit {limit}")]
    TooLarge { k: usize, limit: usize },

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("model inconsistency: {0}")]
    Model(String),

    #[error("coupling from the past did not coalesce by epoch length {max_epoch}")]
    NonCoalescence { max_epoch: f64 },

    #[error("failed to find a prior-positive initial state after {retries} retries")]
    Initialisation { retries: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("interval {index} does not intersect the window")]
    OutsideWindow { index: usize },

    #[error("empty data")]
    EmptyData,

    #[error("io error: {0}")]
    Io(String),

    #[error("config error: {0}")]
    Config(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
