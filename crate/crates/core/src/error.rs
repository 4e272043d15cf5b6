use thiserror::Error;

use crate::context::ContextId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),

    #[error("matrix is not square or has inconsistent rows: {0}")]
    Shape(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not idempotent (residual {residual:e})")]
    NotIdempotent { residual: f64 },

    #[error("observables {first} and {second} do not commute (residual {residual:e})")]
    NonCommutingFamily {
        first: usize,
        second: usize,
        residual: f64,
    },

    #[error("model too large: {0}")]
    ModelTooLarge(String),

    #[error("context has {0} minimal projections; enumeration capped at 20")]
    ContextTooLarge(usize),

    #[error("order cycle between contexts {0} and {1}")]
    CycleDetected(ContextId, ContextId),

    #[error("operator is not an element of context {0}")]
    NotInContext(ContextId),

    #[error("context {sub} is not a subcontext of {sup}")]
    NotASubcontext { sub: ContextId, sup: ContextId },

    #[error("minimal projection {index} of the larger context has no unique image")]
    AmbiguousRestriction { index: usize },

    #[error("unknown context id {0}")]
    UnknownContextId(ContextId),

    #[error("unknown context tag {0:?}")]
    UnknownContextTag(String),

    #[error("redundancy witness invalid: {reason}")]
    WitnessInvalid {
        reason: String,
        projection_index: Option<usize>,
    },

    #[error("datasheet row {row} has {found} fields, expected {expected}")]
    RowLengthMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("datasheet row {row}, column {column}: non-numeric field {value:?}")]
    NonNumericField {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures that indicate a broken internal invariant rather
    /// than bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::CycleDetected(..) | Error::AmbiguousRestriction { .. }
        )
    }
}
