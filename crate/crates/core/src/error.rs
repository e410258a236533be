use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by distributions, oracles, testers and the sampler.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain mismatch: {left} vs {right} elements")]
    DomainMismatch { left: usize, right: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("conditioning set is empty")]
    EmptySet,

    #[error("restriction to a set of zero mass")]
    ZeroMassRestriction,

    #[error("sampler session exhausted after {0} runs")]
    SessionExhausted(u64),

    #[error("reduction failed: bit-query budget of {0} exhausted")]
    ReductionFailed(u64),

    #[error("invalid distribution spec `{spec}`: {reason}")]
    InvalidSpec { spec: String, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn spec(spec: &str, reason: impl Into<String>) -> Self {
        Error::InvalidSpec {
            spec: spec.to_string(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
