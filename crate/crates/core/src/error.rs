use thiserror::Error;

/// Failure modes shared by every solver in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the region where the requested quantity exists.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical routine failed to reach its tolerance.
    #[error("numeric error: {message} (worst residual {residual:.3e})")]
    Numeric { message: String, residual: f64 },
    /// The instance is larger than an exact solver accepts.
    #[error("capacity error: {0}")]
    Capacity(String),
    /// An input object violates its own invariants.
    #[error("contract violation: {0}")]
    Contract(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>, residual: f64) -> Self {
        Error::Numeric {
            message: msg.into(),
            residual,
        }
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
