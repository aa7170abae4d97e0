use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The density is at or above `1/V_D`; no finite speed bound exists.
    #[error("density {nu} is at or above the threshold 1/V_D = {threshold}")]
    ThresholdExceeded { nu: f64, threshold: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("statistics error: {0}")]
    Stats(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn stats(msg: impl Into<String>) -> Self {
        Error::Stats(msg.into())
    }
}
