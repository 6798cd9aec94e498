//! Error type shared by all modules.

/// Errors reported by the library.
///
/// Numeric code paths are deliberately infallible once their inputs have been
/// validated, so everything here is either a parameter/configuration problem
/// caught up front, a broken caller contract, or an I/O failure at the CSV
/// boundary.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside its documented domain (dimension mismatch,
    /// zero-sized matrix, sparsity larger than the vector, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A configuration is internally inconsistent for the requested operation
    /// (e.g. frame detection with zero feedback power).
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    /// A caller contract was violated (e.g. demodulating a symbol that is not
    /// a constellation point).
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// Failure while writing simulation output.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for an [`Error::InvalidParameter`] with a formatted message.
    pub fn invalid_parameter(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
