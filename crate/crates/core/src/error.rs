use thiserror::Error;

/// Errors raised by the library. Contract violations on inputs are reported
/// here; invariant violations of computed objects are returned as data (see
/// [`crate::persistence::validate_diagram`]).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape {shape:?} implies {expected} samples but {actual} were given")]
    ShapeMismatch {
        shape: Vec<usize>,
        expected: usize,
        actual: usize,
    },
    #[error("fields have different grids: {left:?} vs {right:?}")]
    GridMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("non-finite sample {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("dimension must be 1, 2 or 3, got {0}")]
    UnsupportedDimension(usize),
    #[error("field has no spectral coefficients")]
    MissingCoefficients,
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("diagrams have different ranges: {left:?} vs {right:?}")]
    RangeMismatch { left: (f64, f64), right: (f64, f64) },
    #[error("sample sets differ in size: {left} vs {right}")]
    SampleCountMismatch { left: usize, right: usize },
    #[error("ensembles are not coupled: {0}")]
    NotCoupled(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
