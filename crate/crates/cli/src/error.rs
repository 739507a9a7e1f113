//! Process-level error split: bad inputs exit 1, failures while doing
//! the work exit 2.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// The request itself is unusable (bad flag value, bad config,
    /// inconsistent manifest).
    Validation(String),
    /// The request was fine but carrying it out failed (I/O, serialization).
    Runtime(String),
    /// The stdout consumer closed the pipe (`aoi sweep | head`). Ends
    /// the run quietly as a success, like any well-behaved filter.
    Pipe,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Pipe => 0,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) | CliError::Runtime(msg) => f.write_str(msg),
            CliError::Pipe => f.write_str("broken pipe"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<aoi_core::Error> for CliError {
    fn from(e: aoi_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}
