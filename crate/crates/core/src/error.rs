use std::path::PathBuf;

use thiserror::Error;

use crate::belief::Category;

pub type Result<T, E = QdbError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum QdbError {
    #[error("matrix is not Hermitian: entry ({row},{col}) deviates from the conjugate of ({col},{row}) by {deviation:e}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("matrix is not square: {len} entries cannot form an n x n matrix")]
    NotSquare { len: usize },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cannot condition on category {0:?}: block has zero amplitude")]
    ZeroBlock(Category),

    #[error("state is not normalized: squared norm {norm_squared}")]
    NotNormalized { norm_squared: f64 },

    #[error("priors must sum to 1: p_g = {p_g}, p_b = {p_b}")]
    InvalidPriors { p_g: f64, p_b: f64 },

    #[error("{name} = {value} is outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid mass function: {0}")]
    InvalidMass(String),

    #[error("mass spec parse error at position {position}: {message}")]
    MassSpec { position: usize, message: String },

    #[error("{}: parse error at row {row}: {message}", path.display())]
    Parse {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{}: row {row}: field `{field}`: {message}", path.display())]
    Validation {
        path: PathBuf,
        row: usize,
        field: &'static str,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
