use thiserror::Error;

/// Errors raised by the calculus when inputs are structurally incompatible.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    VariableMismatch { left: usize, right: usize },

    #[error("{what} index {index} out of range (must be < {bound})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("{what}: expected length {expected}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("bundle mismatch: {0}")]
    BundleMismatch(String),

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("expected a scalar-valued form")]
    NotScalar,

    #[error("expected an algebroid-valued form")]
    NotAlgebroidValued,

    #[error("connection on A has nonzero torsion; a torsion-free connection is required")]
    Torsionful,

    #[error("invalid multi-index {0:?}: entries must be strictly increasing")]
    InvalidMultiIndex(Vec<usize>),

    #[error("invalid rational literal {0:?}")]
    ParseRational(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
