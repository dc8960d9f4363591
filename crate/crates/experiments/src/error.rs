//! Error type shared by the config parser, study runner, and CSV writer.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A config file line that could not be parsed.
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    /// A config value that parsed but fails validation.
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    /// A failure bubbling up from the channel/link library.
    #[error(transparent)]
    Core(#[from] mimo_bands_core::Error),

    /// An I/O failure, annotated with the path involved.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A failure while simulating one grid point, annotated with which one.
    #[error("while simulating {description}: {source}")]
    GridPoint {
        description: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn config(line: usize, message: impl Into<String>) -> Self {
        Error::Config {
            line,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps an error with the description of the grid point being
    /// simulated when it occurred.
    pub fn at_grid_point(description: impl Into<String>, source: Error) -> Self {
        Error::GridPoint {
            description: description.into(),
            source: Box::new(source),
        }
    }
}
