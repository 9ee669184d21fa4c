use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the domain where a quantity is defined
    /// (wavelength outside the Sellmeier window, evanescent wave, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The real part of the Gaussian exponent matrix is not positive definite.
    #[error("integrability failure at {node}: {reason}")]
    Integrability { node: String, reason: String },

    /// A caller broke a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A configuration field is missing or out of range.
    #[error("invalid configuration: {field}: {message}")]
    InvalidConfig { field: String, message: String },

    /// An object is in a state that does not admit the requested operation.
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// No bracketing sign change found by a root solver.
    #[error("root not bracketed: {0}")]
    NoBracket(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors that stem from user configuration rather than numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::InvalidConfig { .. } | Error::Io(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
