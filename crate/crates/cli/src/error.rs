use std::fmt;

use qmflab::{GraphError, NumericError, WickError};

/// A failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable input, malformed or disconnected network, bad arguments.
    Validation(String),
    /// Enumeration or memory budget exceeded.
    Budget(String),
    /// A proven identity failed to hold.
    Lemma(String),
    Other(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Lemma(_) => 4,
            CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Other(m) => f.write_str(m),
            CliError::Budget(m) => write!(f, "budget exceeded: {m}"),
            CliError::Lemma(m) => write!(f, "internal assertion failed: {m}"),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<WickError> for CliError {
    fn from(e: WickError) -> Self {
        match e {
            WickError::Budget { .. } => CliError::Budget(e.to_string()),
            WickError::LemmaViolation(_) => CliError::Lemma(e.to_string()),
            WickError::Graph(g) => g.into(),
            WickError::InvalidK => CliError::Validation(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<NumericError> for CliError {
    fn from(e: NumericError) -> Self {
        match e {
            NumericError::MemoryBudget { .. } => CliError::Budget(e.to_string()),
            NumericError::InvalidArgument(_) | NumericError::DimensionMismatch(_) => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}
