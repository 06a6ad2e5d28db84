use thiserror::Error;

/// Errors produced by the refinement pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or truncated image/record stream.
    #[error("format error at byte {offset}: {message}")]
    Format { offset: usize, message: String },

    /// A caller-supplied value violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Two rasters that must share dimensions do not.
    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },

    #[error("no hits: the scan found no window above the overlap threshold")]
    NoHits,

    #[error("insufficient columns: no refined row has two or more distinct hit columns, so column spacing is undefined")]
    InsufficientColumns,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(message: impl Into<String>) -> Error {
    Error::Argument(message.into())
}
