use thiserror::Error;

/// Error categories surfaced by the library and the experiment harness.
///
/// `Argument` covers caller mistakes (bad ranges, mismatched supports),
/// `Capacity` covers requests that would exceed the configured dense-matrix
/// budget, and `Contract` covers numerical postcondition violations
/// (non-Hermitian input where Hermitian is required, trace drift, solver
/// failures).
#[derive(Debug, Error)]
pub enum Error {
    #[error("argument error: {0}")]
    Argument(String),

    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("contract error: {0}")]
    Contract(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short category tag used by the CLI when mapping errors to exit codes.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Argument(_) => "argument",
            Error::Capacity(_) => "capacity",
            Error::Contract(_) => "contract",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
