use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {constraint}")]
    InvalidParams { constraint: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("color mismatch: {left} vs {right}")]
    ColorMismatch { left: usize, right: usize },

    #[error("level order violated: low level {low} must be below high level {high}")]
    LevelOrder { low: i64, high: i64 },

    #[error("no containing cube found within the scan cap (stopped at level {level_reached})")]
    ScanExhausted { level_reached: i64 },

    #[error("resource limit: {what} needs {requested}, budget is {budget}")]
    ResourceLimit {
        what: &'static str,
        requested: u128,
        budget: u128,
    },

    #[error("numeric overflow: {0}")]
    Overflow(String),

    #[error("invalid sample plan: {0}")]
    InvalidPlan(String),

    #[error("degenerate sample: no pair with separated points")]
    DegenerateSample,

    /// Wraps an evaluation failure with the pair that triggered it.
    #[error("pair #{index} failed: {source}")]
    Pair {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures caused by a search cap or a size budget rather than
    /// bad input.
    pub fn is_resource_limit(&self) -> bool {
        match self {
            Error::ScanExhausted { .. } | Error::ResourceLimit { .. } | Error::Overflow(_) => true,
            Error::Pair { source, .. } => source.is_resource_limit(),
            _ => false,
        }
    }
}
