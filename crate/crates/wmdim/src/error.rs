use std::fmt;

use thiserror::Error;

/// Everything a command can fail with, mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// The config file is not valid JSON for the expected shape.
    #[error("{file}:{line}:{column}: {path}: {message}")]
    Config {
        /// File name.
        file: String,
        /// 1-based line.
        line: usize,
        /// 1-based column.
        column: usize,
        /// JSON path of the offending field.
        path: String,
        /// Parser message.
        message: String,
    },
    /// Parameters are present but inconsistent.
    #[error("invalid parameters: {0}")]
    Parameters(String),
    /// The tower or another input failed validation.
    #[error("validation failed:\n{0}")]
    Validation(String),
    /// A computation error from the core crate.
    #[error(transparent)]
    Core(#[from] wmdim_core::Error),
    /// Reading or writing a file failed.
    #[error("{path}: {source}")]
    Io {
        /// File involved.
        path: String,
        /// Underlying error.
        source: std::io::Error,
    },
}

impl CliError {
    /// 0 success, 2 validation, 3 unresolved comparison, 65 malformed config,
    /// 74 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Parameters(_) => 65,
            CliError::Validation(_) => 2,
            CliError::Core(wmdim_core::Error::Unresolved { .. }) => 3,
            CliError::Core(_) => 2,
            CliError::Io { .. } => 74,
        }
    }
}

/// Shorthand used across the crate.
pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) struct Lines<'a>(pub &'a [String]);

impl fmt::Display for Lines<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.0 {
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}
