use thiserror::Error;

/// Errors produced anywhere in the coded FFT pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no primitive {n}-th root of unity exists in the field")]
    RootUnavailable { n: usize },
    #[error("values belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not invertible in the field")]
    NotInvertible(u64),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("length {len} is not divisible by {m}")]
    IndivisibleLength { len: usize, m: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("no per-axis factorization of {m} for shape {shape:?}")]
    NoFactorization { shape: Vec<usize>, m: usize },
    #[error("repeated evaluation points in Vandermonde generator")]
    DegeneratePoints,
    #[error("generator is not MDS: rows {rows:?} form a singular submatrix")]
    NotMds { rows: Vec<usize> },
    #[error("need at least {needed} shares, got {got}")]
    InsufficientShares { needed: usize, got: usize },
    #[error("duplicate share from worker {0}")]
    DuplicateShare(usize),
    #[error("worker index {index} out of range for {n} workers")]
    WorkerOutOfRange { index: usize, n: usize },
    #[error("recovery threshold {m} exceeds worker count {n}")]
    InfeasibleThreshold { m: usize, n: usize },
    #[error("baseline threshold undefined: {0}")]
    InapplicableBaseline(String),
    #[error("no converse witness found (search space exhausted)")]
    WitnessNotFound,
    #[error("search space too large: {0}")]
    SearchTooLarge(String),
    #[error("decoded output disagrees with the reference transform")]
    PipelineMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed file: {0}")]
    MalformedFile(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
