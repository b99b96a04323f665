use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular matrix (|det| = {det:e})")]
    SingularMatrix { det: f64 },
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("point ({x}, {y}, {z}) lies outside the body domain")]
    OutOfDomain { x: f64, y: f64, z: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("non-positive jacobian J = {jacobian:e}")]
    NonPositiveJacobian { jacobian: f64 },
    #[error("incompressibility constraint violated: |det F - 1| = {violation:e}")]
    ConstraintViolated { violation: f64 },
    #[error("bodies use different deformation families")]
    FamilyMismatch,
    #[error("integrand is not finite at a quadrature node")]
    NonFiniteIntegrand,
    #[error("inadmissible trial field: {condition} residual {residual:e}")]
    InadmissibleTrial { condition: String, residual: f64 },
    #[error("no admissible pressure pair exists: {0}")]
    InfeasibleProblem(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
