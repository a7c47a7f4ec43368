//! Instance files, generators and the experiment commands behind the
//! `outtree` binary.

pub mod commands;
pub mod file;
pub mod generate;
pub mod record;

use outtree::Rational;

pub use commands::{run, Cli};
pub use file::{InstanceFile, Problem, VariantTag};
pub use record::RunRecord;

/// ε used when neither the file nor the command line gives one.
pub const DEFAULT_EPSILON: Rational = Rational::new_raw(1, 2);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid instance: {0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("guarantee violated: {0}")]
    Violation(String),
}

impl CliError {
    /// 1 usage, 2 validation (and any other failure to produce a result),
    /// 3 guarantee violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) | CliError::Io(_) | CliError::Solver(_) => 2,
            CliError::Violation(_) => 3,
        }
    }

    /// Same kind, new message.
    pub fn retitled(self, msg: String) -> CliError {
        match self {
            CliError::Usage(_) => CliError::Usage(msg),
            CliError::Validation(_) => CliError::Validation(msg),
            CliError::Io(_) => CliError::Io(msg),
            CliError::Solver(_) => CliError::Solver(msg),
            CliError::Violation(_) => CliError::Violation(msg),
        }
    }
}

impl From<outtree::Error> for CliError {
    fn from(e: outtree::Error) -> Self {
        match e {
            outtree::Error::SizeCap(m) => {
                CliError::Validation(format!("exact search refused: {m}"))
            }
            outtree::Error::InvalidInput(_)
            | outtree::Error::InvalidNode { .. }
            | outtree::Error::InfeasibleRoot { .. }
            | outtree::Error::VariantMismatch(_) => CliError::Validation(e.to_string()),
            other => CliError::Solver(other.to_string()),
        }
    }
}
