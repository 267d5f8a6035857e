use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("maps do not share domain and codomain")]
    MismatchedSpaces,
    #[error("{0} has no basepoint")]
    MissingBasepoint(&'static str),
    #[error("point index {index} out of range for a space of {len} points")]
    PointOutOfRange { index: usize, len: usize },
    #[error("cover precondition failed: image of block {block:?} lies in no block of the target cover")]
    CoverPrecondition { block: Vec<usize> },
    #[error("partition of unity vanishes at point {point}")]
    DegeneratePartition { point: usize },
    #[error("invalid partition of unity: {0}")]
    InvalidPartition(String),
    #[error("size cap exceeded: reached {count} elements with cap {cap}")]
    CapExceeded { count: usize, cap: usize },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid homomorphism: {0}")]
    InvalidHom(String),
    #[error("maps do not compose: {0}")]
    NotComposable(String),
    #[error("unknown corpus entry `{0}`")]
    UnknownCorpusEntry(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
