use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("unknown config key `{key}` (valid keys: {valid})")]
    UnknownKey { key: String, valid: String },

    #[error("cannot parse value `{value}` for `{key}`: {reason}")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },

    #[error("malformed config line {line}: `{text}`")]
    Syntax { line: usize, text: String },

    #[error("invalid axis spec `{0}` (expected key:start:stop:count)")]
    BadAxis(String),

    #[error("could not build a connected small-world network: {0}")]
    Network(String),

    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
