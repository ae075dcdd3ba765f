use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("bad magic bytes: expected {expected:?}")]
    BadMagic { expected: &'static str },
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u32),
    #[error("truncated file: needed {needed} bytes, found {found}")]
    TruncatedFile { needed: u64, found: u64 },
    #[error("{0} unexpected trailing bytes after payload")]
    TrailingBytes(u64),
    #[error("tensor size overflow: product of dims exceeds 2^40")]
    DimOverflow,
    #[error("invalid tensor: {0}")]
    InvalidTensor(String),
    #[error("unsupported image format {0:?} (only binary P5 is read)")]
    UnsupportedFormat(String),
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("test entries have mixed dims: {first:?} vs {other:?}")]
    MixedDims { first: Vec<usize>, other: Vec<usize> },
    #[error("path {0:?} appears in both train and test splits")]
    OverlappingSplit(String),
    #[error("expected {expected} items, got {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("not a light field: {0}")]
    NotALightfield(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("axis length {len} is not divisible by 2^{levels}")]
    BadWaveletLength { len: usize, levels: u32 },
    #[error("need at least 2 training samples, got {0}")]
    TooFewSamples(usize),
    #[error("requested {requested} components but data rank is {rank}")]
    RankDeficient { requested: usize, rank: usize },
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("negative energy: {0}")]
    NegativeEnergy(f64),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("singular least-squares subproblem at support size {0}")]
    SingularSubproblem(usize),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
