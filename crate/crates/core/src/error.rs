use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("zero polynomial has no weighted degree")]
    ZeroPolynomial,

    #[error("polynomial is not weighted homogeneous: monomial {monomial:?} has weighted degree {found}, expected {expected}")]
    NonHomogeneous {
        monomial: Vec<u32>,
        expected: u32,
        found: u32,
    },

    #[error("point is not on the variety (residual {residual:.3e})")]
    NotOnVariety { residual: f64 },

    #[error("pure dimension of the variety is required but was not declared")]
    MissingPureDim,

    #[error("operation requires a cone (all weights equal to 1)")]
    NotACone,

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("projection converged to a singular point")]
    ConvergedToSingular,

    #[error("singular points closer than 4ε = {min_separation:.3e}")]
    SingularOverlap { min_separation: f64 },

    #[error("chart anchor is a singular point of the variety")]
    SingularAnchor,

    #[error("chart anchor has no coordinate of modulus ≥ 1 (largest {largest:.3e})")]
    PivotTooSmall { largest: f64 },

    #[error("slice Jacobian is rank deficient at the anchor")]
    ImplicitFunctionFailure,

    #[error("slice point at distance {distance:.3e} exceeds chart domain radius {radius:.3e}")]
    OutsideChartDomain { distance: f64, radius: f64 },

    #[error("Newton correction of the slice parametrization diverged")]
    NewtonDivergence,

    #[error("point is not in the image of the chart")]
    NotInChart,

    #[error("weighted Cauchy–Pompeiu transform with m > 0 is undefined at s = 0")]
    ZeroScaleWithWeight,

    #[error("too few successful samples: {succeeded} of {attempted}")]
    InsufficientSamples { succeeded: usize, attempted: usize },

    #[error("projection onto the variety failed along the path at node {node}")]
    ProjectionFailure { node: usize },

    #[error("finite-difference noise dominates ({noisy} of {total} samples inconsistent under step halving)")]
    StepTooSmall { noisy: usize, total: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),
}
