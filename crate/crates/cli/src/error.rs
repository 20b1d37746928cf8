use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Failures that stop a command before it can report. All map to exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitStatus {
    Success,
    /// No family's hypotheses hold, or the requested construction does not apply.
    OutOfScope,
    InputError,
    Mismatch,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::OutOfScope => 1,
            ExitStatus::InputError => 2,
            ExitStatus::Mismatch => 3,
        }
    }
}
