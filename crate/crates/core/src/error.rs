use thiserror::Error;

#[derive(Debug, Error)]
pub enum FleeError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("time {t} precedes the event time {t0}")]
    TimeBeforeEvent { t: f64, t0: f64 },

    #[error("sweep range is empty")]
    EmptyRange,

    #[error("sweep value {value} for `{parameter}` must be positive")]
    NonPositiveValue { parameter: &'static str, value: f64 },

    #[error("sweep value {value} for `{parameter}` must be a whole number of cycles")]
    NonIntegralValue { parameter: &'static str, value: f64 },

    #[error("mapping dimensions must be at least 1x1 (got {rows}x{cols})")]
    ZeroDimension { rows: usize, cols: usize },

    #[error("qubit {qubit} has no escape route within the mapping bounds")]
    Unescapable { qubit: usize },

    #[error("Monte Carlo estimate needs at least one trial")]
    ZeroTrials,

    #[error("unknown qubit id {0}")]
    UnknownQubit(usize),

    #[error("malformed CSV: {0}")]
    Format(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FleeError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> FleeError {
    FleeError::InvalidParam {
        name,
        reason: reason.into(),
    }
}
