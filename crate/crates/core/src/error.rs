use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("logarithm of a non-positive enclosure")]
    NonPositiveLog,

    #[error("ball radius {radius} too large to decide the nearest integer")]
    AmbiguousNearestInteger { radius: String },

    /// An enclosure straddles a decision boundary; more precision may help.
    #[error("undecidable at current precision: {0}")]
    Undecidable(String),

    #[error("precision ceiling of {bits} bits reached")]
    PrecisionCeiling { bits: u64 },

    #[error("invalid precision: {0} bits (minimum 64)")]
    InvalidPrecision(u64),

    #[error("recurrence order must be at least 2, got {0}")]
    InvalidOrder(u64),

    #[error("index {n} is below the first defined index {min}")]
    IndexOutOfRange { n: i64, min: i64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error("continued fraction of {value_id} certified to {certified} quotients, {wanted} requested")]
    ExpansionTooShort {
        value_id: String,
        certified: usize,
        wanted: usize,
    },

    #[error("reduction failed: {0}")]
    ReductionFailed(String),

    #[error("corrupt expansion cache entry: {0}")]
    CacheCorrupt(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether retrying the same computation at a higher precision can
    /// change the outcome.
    pub fn needs_precision(&self) -> bool {
        matches!(
            self,
            Error::Undecidable(_) | Error::AmbiguousNearestInteger { .. } | Error::ExpansionTooShort { .. }
        )
    }
}
