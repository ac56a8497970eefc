use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("series is empty")]
    EmptySeries,

    #[error("series length {0} is too short (need at least 2 points)")]
    TooShort(usize),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("{path}: line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{0}: file contains no series")]
    EmptyFile(PathBuf),

    #[error("duplicate series id {0}")]
    DuplicateId(u64),

    #[error("alphabet size {0} outside [3, 20]")]
    AlphabetSize(usize),

    #[error("frame count {frames} does not divide series length {n}")]
    NotDivisor { n: usize, frames: usize },

    #[error("invalid level configuration: {0}")]
    Levels(String),

    #[error("symbol {symbol} out of range for alphabet size {alphabet}")]
    SymbolRange { symbol: usize, alphabet: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index format: {0}")]
    Format(String),

    #[error("unsupported index header {0:?} (expected \"FASTSAX 1\")")]
    Version(String),

    #[error("index checksum mismatch: stored {stored}, computed {computed}")]
    Checksum { stored: String, computed: String },

    #[error("index fingerprint {index} does not match dataset fingerprint {dataset}")]
    Fingerprint { index: String, dataset: String },

    #[error("epsilon must be finite and >= 0, got {0}")]
    Epsilon(f64),

    #[error("invalid cost model: {0}")]
    CostModel(String),

    #[error(
        "answer sets differ between methods at a={alphabet}, epsilon={epsilon}, query #{query}"
    )]
    AnswerMismatch {
        alphabet: usize,
        epsilon: f64,
        query: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
