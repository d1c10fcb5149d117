//! Library half of the `thinlayer` command line: scenario parsing and
//! validation, the five commands, and deterministic rendering. The binary
//! in `main.rs` is a thin argument-parsing shell over this.

pub mod commands;
pub mod output;
pub mod scenario;

/// Process-level error classes, each with its documented exit code:
/// 0 ok, 1 check failed, 2 validation, 3 solver failure.
#[derive(Debug)]
pub enum CliError {
    /// Bad scenario, arguments or preconditions (exit 2).
    Validation(String),
    /// A diagnostic check failed (exit 1).
    CheckFailed(String),
    /// The eigensolver did not converge (exit 3).
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Solver(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::CheckFailed(m) | CliError::Solver(m) => m,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::CheckFailed(m) => write!(f, "check failed: {m}"),
            CliError::Solver(m) => write!(f, "solver failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
