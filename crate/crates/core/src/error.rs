use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric or structural parameter outside its valid range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("symbol {symbol:?} at position {position} is not in the alphabet")]
    UnknownSymbol { symbol: String, position: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("vocabulary is empty")]
    EmptyVocabulary,

    /// Every training sequence had zero likelihood under the current model.
    #[error("no training sequence has non-zero likelihood")]
    ZeroLikelihood,

    #[error("training the model for {word:?} failed: {source}")]
    Training {
        word: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{}:{line}: {message}", path.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "<input>".into()))]
    Data {
        path: Option<PathBuf>,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn data(line: usize, message: impl Into<String>) -> Self {
        Error::Data {
            path: None,
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attach a file path to a [`Error::Data`] error that was produced by a
    /// parser working on an in-memory string.
    pub fn with_path(self, p: impl Into<PathBuf>) -> Self {
        match self {
            Error::Data {
                path: None,
                line,
                message,
            } => Error::Data {
                path: Some(p.into()),
                line,
                message,
            },
            other => other,
        }
    }

    /// True for errors caused by configuration rather than by the data.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Parameter(_) | Error::EmptyVocabulary => true,
            Error::Training { source, .. } => source.is_config(),
            _ => false,
        }
    }
}
