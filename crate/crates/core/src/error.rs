//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed record at line {line}, column {column}: {message}")]
    MalformedRecord {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: expected {expected} joints, found {found}")]
    JointCountMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("empty stream: no frames parsed")]
    EmptyStream,
    #[error("invalid joint model: {0}")]
    InvalidJointModel(String),
    #[error("informative joint set is empty")]
    EmptyInformativeSet,
    #[error("sequence has {found} frames, at least {needed} required")]
    TooFewFrames { needed: usize, found: usize },
    #[error("zero-length bone: angle is undefined")]
    ZeroLengthBone,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("all rows identical: total variance is zero")]
    ZeroVariance,
    #[error("stream of {found} keyframes is shorter than window length {window_len}")]
    StreamTooShort { window_len: usize, found: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("prediction and truth lengths differ: {pred} vs {truth}")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("at least 2 groups required, found {0}")]
    TooFewGroups(usize),
    #[error("mapping names cluster {0} absent from predictions")]
    UnknownCluster(usize),
    #[error("iteration {t} out of range [0, {t_max})")]
    IterationOutOfRange { t: usize, t_max: usize },
    #[error("unknown activity {0:?} in fixture script")]
    UnknownActivity(String),
    #[error("invalid fixture script segment {0:?}: expected name:frames")]
    BadScriptSegment(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
