use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical operator-theory routines.
///
/// Tolerance-driven: every failure carries the residual or witness that
/// triggered it so reports can surface the worst offender.
#[derive(Clone, Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not Hermitian (asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("matrix is not a contraction (norm {0:.12})")]
    NotContraction(f64),
    #[error("{0} is not in the resolvent set")]
    NotInResolventSet(Complex64),
    #[error("solve is ill-conditioned (condition estimate {0:.3e})")]
    IllConditioned(f64),
    #[error("verified identity residual {0:.3e} exceeds tolerance")]
    IdentityResidualExceeded(f64),
    #[error("approach sequence did not converge (last residual {0:.3e})")]
    NoConvergence(f64),
    #[error("point {0} is outside the admissible domain")]
    BadPoint(Complex64),
    #[error("coupling F' - F'' = 2NN* violated (residual {0:.3e})")]
    CouplingMismatch(f64),
    #[error("extracted graph is multivalued beyond tolerance (residual {0:.3e})")]
    NotAnOperator(f64),
    #[error("relation is not decomposable: dom and mul overlap (residual {0:.3e})")]
    NotDecomposable(f64),
    #[error("relation has empty domain")]
    EmptyDomain,
    #[error("input is not sectorial: {0}")]
    NotSectorial(String),
    #[error("class membership violated: {0}")]
    MembershipViolated(String),
    #[error("degenerate evaluation grid: {0}")]
    GridDegenerate(String),
    #[error("lower bound violated (constant {0:.3e})")]
    BoundViolated(f64),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("sign constraint violated: {0}")]
    SignViolation(String),
    #[error("evaluation point within {0:.3e} of a representation pole")]
    PoleHit(f64),
    #[error("relation is not nonnegative selfadjoint")]
    NotNonnegativeSelfadjoint,
    #[error("parse error: {0}")]
    Parse(String),
}
