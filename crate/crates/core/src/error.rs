use thiserror::Error;

/// Errors raised by the workbench. The CLI maps each variant to an exit code.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the inputs does not hold.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// The request exceeds an enumeration or table-size cap.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// The data is internally inconsistent (e.g. an impossible channel output).
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
