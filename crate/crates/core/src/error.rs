//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("csv parse error at line {line}: {message}")]
    CsvParse { line: u64, message: String },

    #[error("duplicate timestamp {0}")]
    DuplicateTimestamp(String),

    #[error("no usable rows in input")]
    EmptyInput,

    #[error("gap at series boundary (index {0}); interior interpolation only")]
    BoundaryGap(usize),

    #[error("series still contains gaps; repair it first")]
    GapsPresent,

    #[error("non-positive value {value} at index {index}; log transform requires positive values")]
    NonPositive { index: usize, value: f64 },

    #[error("series too short: {len} observations, need at least {min}")]
    TooShort { len: usize, min: usize },

    #[error("aligned sample too small: {len} shared observations, need at least {min}")]
    SampleTooSmall { len: usize, min: usize },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("design matrix is rank deficient (rank {rank} < {cols} columns)")]
    RankDeficient { rank: usize, cols: usize },

    #[error("bandwidth {bandwidth} out of range for {nobs} observations")]
    BandwidthOutOfRange { bandwidth: usize, nobs: usize },

    #[error("periodogram ordinate at frequency index {0} is zero; log-periodogram regression undefined")]
    ZeroOrdinate(usize),

    #[error("statistic undefined: {0}")]
    DegenerateStatistic(String),

    #[error("statistic failed on surrogate replica {index}: {source}")]
    ReplicaFailure {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{failed} of {total} surrogate replicas degenerate for the {test} statistic (first at index {first})")]
    DegenerateReplicas {
        test: &'static str,
        failed: usize,
        total: usize,
        first: usize,
    },

    #[error("unit-root precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("market {market}: {source}")]
    Market {
        market: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
