//! Experiment runner around `mompc-core`: JSON configs in, CSV traces,
//! JSON reports, and plot scripts out.

pub mod config;
pub mod experiment;
pub mod output;

/// Exit taxonomy: 0 all checks pass, 2 a check failed, 3 solver failure,
/// 4 configuration error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunOutcome {
    AllPassed,
    ChecksFailed,
    SolverFailure,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunOutcome::AllPassed => 0,
            RunOutcome::ChecksFailed => 2,
            RunOutcome::SolverFailure => 3,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 4,
            CliError::Solver(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
            CliError::Solver(msg) => write!(f, "solver failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}
