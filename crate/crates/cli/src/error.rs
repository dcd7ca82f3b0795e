use renyi_core::protocol::ProtocolError;
use renyi_core::DistError;

/// Exit code for success.
pub const EXIT_OK: i32 = 0;
/// Exit code for bad flags, unreadable files and malformed input.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for requests over an enumeration or size cap.
pub const EXIT_CAP: i32 = 3;
/// Exit code when the verification suite found violations.
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Cap(String),
    #[error("{failed} of {total} properties failed")]
    VerificationFailed { failed: usize, total: usize },
    #[error("computation failed: {0}")]
    Compute(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Cap(_) => EXIT_CAP,
            CliError::VerificationFailed { .. } => EXIT_VERIFY,
            CliError::Compute(_) => 1,
            _ => EXIT_CONFIG,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::EnumerationCap { .. } | ProtocolError::Dist(DistError::SizeOverflow { .. }) => {
                CliError::Cap(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<DistError> for CliError {
    fn from(e: DistError) -> Self {
        match e {
            DistError::SizeOverflow { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
