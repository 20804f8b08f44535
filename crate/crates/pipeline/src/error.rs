use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Engine(#[from] eit_core::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{}: {source}", path.display())]
    Image {
        path: PathBuf,
        source: image::ImageError,
    },

    #[error("manifest line {line}: {source}")]
    ManifestParse {
        line: usize,
        source: serde_json::Error,
    },

    #[error("split counts sum to {requested} but the corpus has {available} keys")]
    CountMismatch { requested: usize, available: usize },

    #[error("split ratios must be non-negative and sum to 1, got {0:?}")]
    BadRatios([f64; 3]),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("duplicate key `{0}`")]
    DuplicateKey(String),

    #[error("stratified splitting needs ratios, not counts")]
    StratifyNeedsRatios,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
