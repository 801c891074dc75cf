use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no erase region fits the {width}x{height} image after {attempts} attempts")]
    NoFit {
        width: usize,
        height: usize,
        attempts: usize,
    },

    #[error("occlusion level {0} outside [0, 1]")]
    InvalidLevel(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("batch needs at least two distinct classes, found {0}")]
    InsufficientClasses(usize),

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("branch {0} appears more than once")]
    DuplicateBranch(String),

    #[error("efficiency score needs at least two models, got {0}")]
    EmptyModelList(usize),

    #[error("reference score denominator is not positive ({0})")]
    NonPositiveDenominator(f64),

    #[error("rank {rank} outside [1, {gallery}]")]
    InvalidRank { rank: usize, gallery: usize },

    #[error("no query has a valid gallery match")]
    NoValidQuery,

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(PathBuf),

    #[error("corrupt data in {path}: {reason}")]
    CorruptData { path: PathBuf, reason: String },

    #[error("missing annotation for {0}")]
    MissingAnnotation(String),

    #[error("feature extractor failed: {0}")]
    Extractor(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn corrupt(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::CorruptData {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
