//! Error taxonomy mapped to process exit codes: 1 for usage and parse
//! problems, 2 for solver failures, 3 for internal invariant violations.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Solver(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Solver(m) => write!(f, "solver failure: {m}"),
            CliError::Internal(m) => write!(f, "internal invariant violation: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<vmac_sim::SimError> for CliError {
    fn from(e: vmac_sim::SimError) -> Self {
        CliError::Solver(e.to_string())
    }
}

impl From<vmac_core::solver::SolveError> for CliError {
    fn from(e: vmac_core::solver::SolveError) -> Self {
        CliError::Solver(e.to_string())
    }
}

impl From<vmac_core::ModelError> for CliError {
    fn from(e: vmac_core::ModelError) -> Self {
        CliError::Solver(e.to_string())
    }
}
