use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular evaluation: {0}")]
    SingularEvaluation(String),

    #[error("point {0:?} lies on the boundary")]
    PointOnBoundary(Vec<f64>),

    #[error("point {0:?} lies outside the domain")]
    PointOutsideDomain(Vec<f64>),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid boundary condition: {0}")]
    InvalidCondition(String),

    #[error("no adjoint boundary conditions given and no default applies: {0}")]
    MissingAdjoint(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The boundary-response matrix is too ill-conditioned to invert.
    #[error("ill-posed problem: condition estimate {condition:.3e} exceeds threshold")]
    IllPosed { condition: f64 },

    #[error("singular boundary-response matrix (condition estimate {condition:.3e})")]
    SingularMatrix { condition: f64 },

    #[error("singular block in block inversion: {which}")]
    SingularBlock { which: String },

    /// Stage `stage` (1-based, in construction order) of the recursion could not be inverted.
    #[error("stage {stage} of the recursive construction is singular (condition estimate {condition:.3e})")]
    StageSingular { stage: usize, condition: f64 },

    /// Right-hand side outside the range of a rank-deficient boundary-response matrix.
    #[error("boundary data inconsistent with rank-deficient boundary operator (relative residual {residual:.3e})")]
    Inconsistent { residual: f64 },

    #[error("reference parameters hit an eigenvalue: {0}")]
    EigenvalueParameters(String),

    #[error("singular finite-difference system: {0}")]
    SingularSystem(String),
}
