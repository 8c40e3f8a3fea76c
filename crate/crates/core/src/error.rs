use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("projection residual {residual:e} exceeds tolerance {tolerance:e}")]
    ProjectionOverflow { residual: f64, tolerance: f64 },

    #[error("Newton inversion did not converge for target {target}")]
    NewtonDivergence { target: f64 },

    #[error("map is not orientation preserving: min f' = {min_derivative}")]
    NotOrientationPreserving { min_derivative: f64 },

    #[error("non-positive Jacobian {value} under a fractional power")]
    NonIntegerPowerDomain { value: f64 },

    #[error("density weights {lhs} and {rhs} do not pair (sum must be 1)")]
    WeightMismatch { lhs: f64, rhs: f64 },

    #[error("periodic and anti-periodic carriers cannot be combined here")]
    ParityMismatch,

    #[error("diffeomorphisms do not act on anti-periodic densities")]
    AntiPeriodicTransport,

    #[error("conjugated operator kept a first-derivative term of size {residual:e}")]
    NotSturmLiouville { residual: f64 },

    #[error("derivative-order {order} coefficient of size {residual:e} survived")]
    NotTangent { order: usize, residual: f64 },

    #[error("Wronskian drift {drift:e} exceeds {tolerance:e}; increase the step count")]
    StepCountTooSmall { drift: f64, tolerance: f64 },

    #[error("result does not close up over the period: jump {residual:e} > {tolerance:e}")]
    NotPeriodic { residual: f64, tolerance: f64 },

    #[error("elements belong to different sectors")]
    SectorMismatch,

    #[error("independent computations disagree by {residual:e} (tolerance {tolerance:e})")]
    ActionMismatch { residual: f64, tolerance: f64 },

    #[error("weight {weight} does not give an integer exponent")]
    NonIntegerExponent { weight: f64 },

    #[error("leading coefficient must be non-zero")]
    DegenerateOperator,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),
}
