use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("inner product is degenerate")]
    SingularGram,

    #[error("operation requires exact (rational) arithmetic")]
    ExactModeRequired,

    #[error("value {0} has no small-denominator rational representation")]
    NotRational(f64),

    #[error("vector has a nonzero {0} component where none is allowed")]
    ForbiddenComponent(&'static str),

    #[error("induced form on {0} is degenerate")]
    DegenerateForm(&'static str),

    #[error("ker J is degenerate, so E = ker J + E2 cannot be an orthogonal splitting")]
    NonOrthogonalKernelSplit,

    #[error("J is not invertible on the complement of its kernel")]
    SingularJOnE2,

    #[error("center is degenerate (U != 0)")]
    DegenerateCenter,

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("integrator failure: {0}")]
    IntegratorFailure(String),

    #[error("lattice generators do not form a basis")]
    NotABasis,

    #[error("lattice generators are not a canonical generating set: {0}")]
    NotCanonical(String),

    #[error("period spectrum closed form needs [n,n] in U and E = 0")]
    FlatCaseOnly,

    #[error("v* is not a scalar multiple of v0")]
    InconsistentPeriodRatio,

    #[error("x* is not orthogonal to [x*, n]")]
    PerpConditionFailed,

    #[error("the identity translates every geodesic and has no period")]
    IdentityElement,

    #[error("no xi with a' = a* + [x*, xi]")]
    NoXiSolution,

    #[error("parse error: {0}")]
    Parse(String),
}
