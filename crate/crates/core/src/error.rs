use thiserror::Error;

use crate::ring::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: incompatible shapes {}x{} and {}x{}", left.0, left.1, right.0, right.1)]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("vector length {found} does not match expected length {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid group orders {orders:?}: {reason}")]
    InvalidGroup { orders: Vec<usize>, reason: String },

    #[error("ring elements belong to different groups {left:?} and {right:?}")]
    SpecMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("generator count must be at least 1")]
    NoGenerators,

    #[error("expected {expected} generators, got {found}")]
    GeneratorCount { expected: usize, found: usize },

    #[error("circulants {0} and {1} do not commute")]
    NotCommuting(usize, usize),

    #[error("boundary maps {0} and {1} do not compose to zero")]
    NotAComplex(usize, usize),

    #[error("orthogonality check failed: {0}")]
    Orthogonality(&'static str),

    #[error("q = {q} out of range 1..={max} for t = {t}")]
    QOutOfRange { q: usize, t: usize, max: usize },

    #[error("{0} metacheck absent for this code")]
    NoMetacheck(&'static str),

    #[error("enumeration needs {needed:.3e} candidates, budget is {budget:.3e}")]
    BudgetExceeded { needed: f64, budget: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{format} line {line}: {message}")]
    Format {
        format: &'static str,
        line: usize,
        message: String,
    },
}
