use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid interval ({lo}, {hi}): endpoints must be finite with lo < hi")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("invalid set description: {field}: {reason}")]
    InvalidSet { field: String, reason: String },

    #[error("window ({lo}, {hi}) holds more than {cap} points that must be listed individually")]
    WindowTooLarge { lo: f64, hi: f64, cap: usize },

    #[error("the set has no points")]
    EmptySet,

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed set document: {0}")]
    Parse(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
