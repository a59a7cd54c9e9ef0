//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by parsing, validation, and the statistical routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A detail line did not match `item_id<TAB>of_interest<TAB>found_by_1<TAB>found_by_2`.
    #[error("line {line}: {msg}")]
    MalformedLine { line: usize, msg: String },

    #[error("line {line}: duplicate item id `{id}`")]
    DuplicateId { line: usize, id: String },

    /// A record that is not of interest must have been produced by at least one system.
    #[error("line {line}: item `{id}` is not of interest yet found by neither system")]
    SpuriousUnfound { line: usize, id: String },

    #[error("no records")]
    NoRecords,

    #[error("no items of interest")]
    NoItemsOfInterest,

    #[error("inconsistent counts: {0}")]
    InconsistentCounts(String),

    /// A count needed by the requested computation was not supplied.
    #[error("missing count `{0}`")]
    MissingCount(&'static str),

    /// The requested metric has no defined value on the given data.
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested method cannot be applied to the requested metric.
    #[error("invalid method/metric combination: {0}")]
    InvalidCombination(String),

    /// A test statistic exists but is degenerate on the supplied data
    /// (zero variance, no discriminating items, and similar).
    #[error("degenerate statistic: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("invalid counts JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when a statistic exists but is degenerate on the supplied data,
    /// as opposed to the input being malformed.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::Degenerate(_) | Error::UndefinedMetric(_))
    }

    pub fn is_invalid_combination(&self) -> bool {
        matches!(self, Error::InvalidCombination(_))
    }
}
