//! Crate-wide error type.

use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,

    #[error("empty vocabulary: every token was unknown or a stop word")]
    EmptyVocabulary,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("layer sizes do not chain: {0:?}")]
    BadLayerSizes(Vec<usize>),

    #[error("label index {label} out of range for {num_labels} labels")]
    LabelOutOfRange { label: usize, num_labels: usize },

    #[error("empty batch")]
    EmptyBatch,

    #[error("empty class set")]
    EmptyClassSet,

    #[error("class set needs at least 2 classes, got {0}")]
    TooFewClasses(usize),

    #[error("class name {name:?} contains no in-vocabulary words")]
    ClassNameOutOfVocabulary { name: String },

    #[error("network has no hidden layer, so it defines no embedding")]
    NoEmbeddingLayer,

    #[error("non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("{path}:{line}: {message}")]
    MalformedLine {
        path: String,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("split fractions must sum to 1, got {0}")]
    BadFractions(f64),

    #[error("AUC needs at least one positive and one negative label")]
    DegenerateLabels,

    #[error("k = {k} exceeds candidate count {n}")]
    KTooLarge { k: usize, n: usize },

    #[error("unknown class {0:?}")]
    UnknownClass(String),

    #[error("unknown URL {0:?}")]
    UnknownUrl(String),

    #[error("vocabulary hash mismatch: model was trained against a different vocabulary")]
    VocabularyHashMismatch,

    #[error("bad model file: {0}")]
    BadModelFile(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
