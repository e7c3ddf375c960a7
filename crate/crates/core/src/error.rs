use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Inputs outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Inconsistent or unusable configuration.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("integration failed at r = {r:e}: {reason}")]
    Integration { r: f64, reason: String },
    /// Indicial exponents that differ by an integer in a way that needs log terms.
    #[error("logarithmic Frobenius case: exponent {rho} resonates with {other} at order {order}")]
    Logarithmic { rho: f64, other: f64, order: usize },
    #[error("accuracy target not met: {0}")]
    Accuracy(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for errors caused by the caller's input rather than the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Config(_))
    }
}
