use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("enumeration of {count} configurations exceeds the cap of {cap}")]
    EnumerationTooLarge { count: u128, cap: usize },
    #[error("conditional at coordinate {coordinate} is undefined: section has zero mass")]
    UndefinedConditional { coordinate: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("alphabet is not the hypercube {{-1, +1}} at coordinate {0}")]
    NotHypercube(usize),
    #[error("order {k} exceeds the admissible maximum {max}")]
    OrderTooLarge { k: usize, max: usize },
    #[error("ratio is undefined for functions that are constant on the support")]
    UndefinedRatio,
    #[error("t-grids of curve and bound differ")]
    GridMismatch,
    #[error("operation requires a product measure")]
    NotProduct,
    #[error("no proper coloring exists")]
    NoProperColoring,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
