use std::fmt;
use std::path::Path;

/// CLI failure, carrying the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments (exit 2).
    Validation(String),
    /// A pipeline stage failed on valid input (exit 3).
    Processing(String),
    /// Reading or writing files failed, or an input file is malformed (exit 4).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Processing(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }

    /// Attributes a core error to the file it came from.
    pub fn in_file(path: &Path, err: dashgrid::Error) -> Self {
        match CliError::from(err) {
            CliError::Io(m) => CliError::Io(format!("{}: {m}", path.display())),
            other => other,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Processing(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<dashgrid::Error> for CliError {
    fn from(err: dashgrid::Error) -> Self {
        use dashgrid::Error as E;
        match err {
            E::Argument(_) => CliError::Validation(err.to_string()),
            E::Format { .. } => CliError::Io(err.to_string()),
            E::NoHits | E::InsufficientColumns | E::DimensionMismatch { .. } => {
                CliError::Processing(err.to_string())
            }
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
