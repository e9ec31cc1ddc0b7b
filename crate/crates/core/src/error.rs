//! Error type shared by every module, with the process exit codes the CLI
//! maps each class to.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated an operation precondition (dimension mismatch,
    /// out-of-range coordinate, mismatched lattices, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The sampled workspace carries no usable dexterity information
    /// (all-zero dexterity, or a threshold removed every sample).
    #[error("degenerate workspace: {0}")]
    DegenerateWorkspace(String),

    /// The ergonomic occupancy volume is empty, so F = V_I / V_R is undefined.
    #[error("degenerate ergonomic model: {0}")]
    DegenerateErgonomicModel(String),

    /// Floating-point breakdown beyond the documented round-off allowances.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Anything wrong with the run configuration: unreadable file, parse
    /// error, unknown key, schema or invariant violation.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI exit code: 0 success, 2 config error, 3 degenerate workspace,
    /// 4 numerical failure. I/O and precondition bugs surface as 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::DegenerateWorkspace(_) | Error::DegenerateErgonomicModel(_) => 3,
            Error::NumericalFailure(_) => 4,
            Error::InvalidInput(_) | Error::Io(_) => 1,
        }
    }
}
