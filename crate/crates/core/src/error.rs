use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised anywhere in the pipeline.
///
/// The variants line up with the CLI exit codes: parse failures exit with 2,
/// validation failures with 3, numerical failures with 4 and invariant
/// violations with 5.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("numerical failure: {message} (relative residual {residual:e})")]
    Numerical { message: String, residual: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::Invalid(_) => 3,
            Error::Numerical { .. } => 4,
            Error::Invariant(_) => 5,
            Error::Io(_) => 1,
        }
    }
}
