use crate::C64;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong in the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("omega set is empty")]
    EmptyOmega,
    #[error("omega set has no point other than the origin")]
    NoNonzeroPoint,
    #[error("malformed generator rule: {0}")]
    MalformedGenerator(&'static str),
    #[error("enumeration would produce too many points ({0})")]
    TooManyPoints(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("parameter {t} outside path domain [{a}, {b}]")]
    OutOfDomain { t: f64, a: f64, b: f64 },
    #[error("path pieces are not continuous at junction {index}")]
    Discontinuous { index: usize },
    #[error("path is not closed")]
    NotClosed,
    #[error("point lies on the curve")]
    PointOnCurve,
    #[error("winding number not near an integer: {0}")]
    NonIntegerWinding(f64),
    #[error("path derivative vanishes at t={t}")]
    VanishingDerivative { t: f64 },
    #[error("path clearance is zero at t={t}")]
    PathTouchesOmega { t: f64 },

    #[error("germ centers differ")]
    CenterMismatch,
    #[error("germ must be centered at the origin")]
    NotAtOrigin,
    #[error("point at distance {distance} exceeds the safe disk {limit}")]
    OutsideSafeDisk { distance: f64, limit: f64 },
    #[error("recentering shift {shift} too large for radius {radius}")]
    ShiftTooLarge { shift: f64, radius: f64 },
    #[error("singular point {point} of the germ is not in omega")]
    NotOmegaContinuable { point: C64 },
    #[error("germ is singular at its expansion center {0}")]
    SingularCenter(C64),

    #[error("continuation radius collapsed below {floor} at t={t}")]
    RadiusCollapse { t: f64, floor: f64 },
    #[error("continuation tail estimate failed at t={t}")]
    TailFailure { t: f64 },

    #[error("epsilon {epsilon} too large: 2*epsilon must stay below the separation {separation}")]
    EpsilonTooLarge { epsilon: f64, separation: f64 },

    #[error(
        "vector field denominator vanishes at zeta={zeta}, t={t}: both zeta and gamma(t)-zeta lie in the zero set"
    )]
    VanishingDenominator { zeta: C64, t: f64 },
    #[error("segmentation failed: {0}")]
    Segmentation(&'static str),
    #[error("segmentation precondition violated: {0}")]
    Precondition(&'static str),
    #[error("clearance parameter {0} is below the floor 1e-4")]
    ClearanceFloor(f64),
    #[error("omega is not stable under addition: {a} + {b} is missing")]
    NotAdditionStable { a: C64, b: C64 },
    #[error("homotopy failed validation: {0}")]
    InvalidHomotopy(&'static str),
    #[error("fiber chord too long for the local germ radius at s-index {index}")]
    FiberTooCoarse { index: usize },
    #[error("quadrature did not converge: change {change} under refinement")]
    QuadratureNonConvergence { change: f64 },
}
