use nalgebra::Vector3;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported algebra dimension {0} (allowed range {1}..={2})")]
    InvalidDimension(usize, usize, usize),

    #[error("structure constants are not antisymmetric (deviation {0:e})")]
    NotAntisymmetric(f64),

    #[error("not a Lie algebra: Jacobi residual {0:e}")]
    NotLieAlgebra(f64),

    #[error("unsupported cochain degree {0}")]
    UnsupportedDegree(usize),

    #[error("two-cochain is not closed: cocycle residual {0:e}")]
    CocycleViolation(f64),

    #[error("basis vector e_{0} is not central (max bracket {1:e})")]
    NotCentral(usize, f64),

    #[error("representation is not faithful on the sampled angles")]
    NotFaithful,

    #[error("not a circle representation: {0}")]
    NotCircleRep(String),

    #[error("point outside chart domain: {0}")]
    Domain(String),

    #[error("metric matrix is singular or not positive definite at {0:?}")]
    SingularMetric(Vector3<f64>),

    #[error("invalid finite-difference step {0}")]
    InvalidStep(f64),

    #[error("tangent vectors are linearly dependent")]
    DependentVectors,

    #[error("geodesic left the chart domain after {} of {steps} steps", path.len().saturating_sub(1))]
    LeftChart { path: Vec<Vector3<f64>>, steps: usize },

    #[error("inconclusive {quantity}: measured {value:e} lies between the zero and nonzero thresholds")]
    Inconclusive { quantity: String, value: f64 },

    #[error("inconsistent geometry: {0}")]
    Inconsistent(String),

    #[error("missing input: {0}")]
    Missing(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown geometry label `{0}`")]
    UnknownLabel(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
