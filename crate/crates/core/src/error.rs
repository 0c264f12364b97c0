use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates its documented range.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A numeric input is outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("failed to parse scenario: {0}")]
    ScenarioParse(String),

    #[error("invalid scenario: {0}")]
    ScenarioInvalid(String),

    /// No feasible combination reaches this station.
    #[error("station {sta} cannot be scheduled: {reason}")]
    Unschedulable { sta: usize, reason: String },

    #[error("throughput model error: {0}")]
    Model(String),

    #[error("experiment error: {0}")]
    Experiment(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Process exit codes used by the command-line tool.
pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    /// Command-line syntax errors (reported by the argument parser).
    pub const USAGE: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const SCENARIO: i32 = 4;
    pub const RUNTIME: i32 = 5;
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => exit_code::CONFIG,
            Error::ScenarioParse(_) | Error::ScenarioInvalid(_) => exit_code::SCENARIO,
            _ => exit_code::RUNTIME,
        }
    }
}
