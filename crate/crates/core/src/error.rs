use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("scenario mismatch: {left} vs {right}")]
    ScenarioMismatch { left: String, right: String },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("monomial {0} is not computable in quantum mechanics")]
    NonComputable(String),

    #[error("enumeration of 2^{bits} assignments exceeds the cap of {cap}")]
    TooLarge { bits: usize, cap: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("missing value for symbol {0}")]
    MissingSymbol(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unknown catalog entry or variant: {0}")]
    Unknown(String),

    #[error("catalog self-check failed for {name}: {reason}")]
    SelfCheck { name: String, reason: String },

    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    #[error("no quantum violation: optimized value {value} does not exceed bound {bound}")]
    NoViolation { value: f64, bound: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
