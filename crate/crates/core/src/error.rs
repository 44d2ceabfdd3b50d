use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("support indices must be strictly increasing (found {prev} then {next})")]
    UnsortedSupport { prev: usize, next: usize },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("graph generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: usize, reason: String },

    #[error("enumeration of {cost} items exceeds the budget of {budget}")]
    BudgetExceeded { cost: u128, budget: u128 },

    #[error("generator {generator} has weight {weight}, above the catalog cap of {cap}")]
    GeneratorTooHeavy {
        generator: usize,
        weight: usize,
        cap: usize,
    },

    #[error("invalid syndrome: {0}")]
    InvalidSyndrome(String),

    #[error("CSS condition violated: X row {x_row} and Z row {z_row} overlap oddly")]
    CssViolation { x_row: usize, z_row: usize },

    #[error("parameter mismatch: rank-based k = {rank_k}, product formula k = {formula_k}")]
    ParameterMismatch { rank_k: usize, formula_k: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
