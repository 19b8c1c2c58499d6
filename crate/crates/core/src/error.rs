use thiserror::Error;

/// Errors raised by manifold operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("tangent vectors live at different base points ({left} vs {right})")]
    BaseMismatch { left: u64, right: u64 },

    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("singular retraction: {0}")]
    Singular(String),

    #[error("invalid manifold parameters: {0}")]
    InvalidDimensions(String),

    #[error("point is infeasible: defining equations violated by {0:e}")]
    Infeasible(f64),

    #[error("matrix is not tangent: projection residual {0:e}")]
    NotTangent(f64),

    #[error("failed to sample a nonzero tangent direction after {0} attempts")]
    DegenerateSample(usize),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;

/// A configuration value outside its admissible range.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid parameter: {0}")]
pub struct ParameterError(pub String);
