use thiserror::Error;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_ASSERTION: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_PRECONDITION: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable files, malformed JSON or schema violations.
    #[error("configuration error: {0}")]
    Config(String),
    /// Well-formed input that a computation refuses, such as a surface
    /// that is not maximal achronal.
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Core(#[from] achronal::Error),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Output(_) => EXIT_CONFIG,
            CliError::Core(achronal::Error::Inconsistent(_)) => EXIT_ASSERTION,
            CliError::Precondition(_) | CliError::Core(_) => EXIT_PRECONDITION,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.into())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
