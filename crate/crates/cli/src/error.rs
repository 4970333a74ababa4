//! CLI error type carrying the process exit code.
//!
//! Exit codes: 0 success, 2 input error (unreadable or malformed files,
//! bad arguments), 3 physics or consistency error (invalid states,
//! out-of-range purities, infeasible parameters, failed verification).

use std::fmt;

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PHYSICS: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn physics(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_PHYSICS,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::input(format!("io error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::input(format!("malformed JSON: {e}"))
    }
}

impl From<entcert::Error> for CliError {
    fn from(e: entcert::Error) -> Self {
        use entcert::Error::*;
        let code = match e {
            BadShape { .. } | DimensionMismatch { .. } | ZeroCounts | NoParityCounts
            | ZeroShots | FockDimensionTooLarge { .. } | InvalidArgument(_) => EXIT_INPUT,
            NotHermitian { .. }
            | TraceNotOne { .. }
            | NotPositiveSemidefinite { .. }
            | NotNormalized { .. }
            | NegativeEntry { .. }
            | EigenSolverFailed { .. }
            | NotMaximallyCorrelated { .. }
            | SupportOutsideCorrelatedSubspace { .. }
            | GammaOutOfRange { .. }
            | GammaZero
            | NoCorrelatedCounts
            | PurityOutOfRange { .. }
            | NoFeasiblePoint { .. } => EXIT_PHYSICS,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
