use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-integral order: eta product has leading exponent {0}")]
    NonIntegralOrder(String),
    #[error("negative order: eta product starts at q^{0}")]
    NegativeOrder(i64),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("invalid form metadata: {0}")]
    InvalidMeta(String),
    #[error("unknown form `{0}`")]
    UnknownForm(String),
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("insufficient precision for {what}: need {required} coefficients, have {available}")]
    InsufficientPrecision {
        what: String,
        required: usize,
        available: usize,
    },
    #[error("weight mismatch: {0}")]
    WeightMismatch(String),
    #[error("case mismatch: {0}")]
    CaseMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("tail bound diverges: decay exponent {0} must exceed 1")]
    Divergent(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
