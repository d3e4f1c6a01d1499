use thiserror::Error;

/// Crate-wide error type.
///
/// Validation failures (bad parameters, malformed configs) are distinguished
/// from runtime failures (I/O) so the CLI can map them to different exit
/// codes.
#[derive(Debug, Error)]
pub enum CovlabError {
    /// A constructor or validator rejected a parameter value. `field` names
    /// the offending field exactly as it appears in specs and config files.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// Two arguments that must agree on dimension did not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An operation was called on a spec kind it does not support.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// A config file failed to parse. Line numbers are 1-based.
    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CovlabError {
    pub fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        CovlabError::InvalidParameter { field, reason: reason.into() }
    }

    /// True for errors that should be reported as "the input was bad"
    /// (CLI exit code 2) rather than "the run failed" (exit code 3).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            CovlabError::InvalidParameter { .. }
                | CovlabError::DimensionMismatch(_)
                | CovlabError::Unsupported(_)
                | CovlabError::Config { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, CovlabError>;
