use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("inconsistent: {0}")]
    Inconsistent(String),
    /// A surface whose graph function is not 1-Lipschitz.
    #[error("not maximal achronal: {0}")]
    NotAchronal(String),
}

impl Error {
    /// Prefix of the display form of [`Error::NotAchronal`], which survives
    /// being wrapped by a deserializer.
    pub const NOT_ACHRONAL: &'static str = "not maximal achronal";
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn numeric(msg: impl Into<String>) -> Error {
    Error::NumericFailure(msg.into())
}
