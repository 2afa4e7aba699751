use std::path::PathBuf;

use thiserror::Error;

/// Exit status for a successful run.
pub const EXIT_OK: u8 = 0;
/// Exit status when writing the output file fails.
pub const EXIT_IO: u8 = 1;
/// Exit status for unreadable, malformed or invalid input.
pub const EXIT_INVALID: u8 = 2;
/// Exit status when the analysis rejects the scenario.
pub const EXIT_ANALYSIS: u8 = 3;
/// Exit status when the simulation diverges.
pub const EXIT_DIVERGED: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{origin}:{line}:{column}: {message}")]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("unknown scenario `{0}`; available: fig1, fig2, switched")]
    UnknownScenario(String),
    #[error("analysis failed: {0}")]
    Analysis(#[from] leadcons_core::Error),
    #[error("check failed: {0} condition(s) not met")]
    CheckFailed(usize),
    #[error("simulation diverged after t = {0}")]
    Diverged(f64),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Write { .. } => EXIT_IO,
            CliError::Read { .. }
            | CliError::Parse { .. }
            | CliError::Invalid(_)
            | CliError::UnknownScenario(_) => EXIT_INVALID,
            CliError::Analysis(_) | CliError::CheckFailed(_) => EXIT_ANALYSIS,
            CliError::Diverged(_) => EXIT_DIVERGED,
        }
    }
}
