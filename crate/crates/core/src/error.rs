use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value failed validation. `field` is a dotted path
    /// such as `generation.signal_probability`.
    #[error("{field}: {message}")]
    InvalidConfig { field: String, message: String },

    /// The configuration document could not be parsed.
    #[error("{0}")]
    ConfigParse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed {what}: {message}")]
    Format { what: &'static str, message: String },

    /// Training produced a non-finite loss.
    #[error("{model} training diverged: {detail}")]
    Divergence { model: &'static str, detail: String },

    #[error("lexicon is missing descriptor `{0}`")]
    MissingDescriptor(String),

    #[error("population size must be at least 1")]
    EmptyPopulation,

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("class {class} is out of range for {classes} classes")]
    ClassOutOfRange { class: usize, classes: usize },

    #[error("feature width {found} does not match expected width {expected}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("non-finite input value")]
    NonFinite,

    #[error("cannot split {samples} samples into {folds} folds")]
    InvalidFolds { folds: usize, samples: usize },

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code for the command line tool: 2 for configuration
    /// problems, 3 for I/O, 4 for numeric divergence, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig { .. } | Error::ConfigParse(_) => 2,
            Error::Io { .. } => 3,
            Error::Divergence { .. } => 4,
            _ => 1,
        }
    }
}
