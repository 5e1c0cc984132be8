use thiserror::Error;

/// Errors produced by grid construction, operator application and the solvers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("axis {axis}: need at least 5 nodes per axis, got {nodes}")]
    TooFewNodes { axis: usize, nodes: usize },
    #[error("axis {axis}: interval [{min}, {max}] is empty or reversed")]
    EmptyInterval { axis: usize, min: f64, max: f64 },
    #[error("expected {expected} values for this grid, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("operands live on different grids")]
    GridMismatch,
    #[error("field is not clamped: value {value:e} at boundary node {node}")]
    NotClamped { node: usize, value: f64 },
    #[error("coefficient tensor is not admissible: {0}")]
    NotSpd(String),
    #[error("obstacle is positive at boundary node {node} (phi = {value:e}); no clamped field can stay above it")]
    Infeasible { node: usize, value: f64 },
    #[error("eigensolve failed: {0}")]
    Eigensolve(String),
    #[error("clamped operator lost positivity: smallest eigenvalue {0:e} <= 0")]
    NotCoercive(f64),
    #[error("{interior} interior nodes exceed the dense-eigensolve limit of {limit}; request the iterative mode")]
    TooLargeForDense { interior: usize, limit: usize },
    #[error(
        "conjugate gradient stalled after {iterations} iterations (relative residual {residual:e})"
    )]
    LinearSolve { iterations: usize, residual: f64 },
    #[error("dual field is not admissible: max(f - divDiv y*) = {violation:e} exceeds tolerance {tol:e}")]
    InadmissibleDual { violation: f64, tol: f64 },
    #[error("approximation leaves the constraint set: min(v - phi) = {violation:e}")]
    OutsideConstraintSet { violation: f64 },
    #[error("dual repair could not reach admissibility (residual {residual:e} after {attempts} attempts)")]
    RepairFailed { residual: f64, attempts: usize },
    #[error("{unknowns} unknowns exceed the enumeration oracle limit of {limit}")]
    TooLargeForOracle { unknowns: usize, limit: usize },
    #[error("active-set enumeration found no KKT point (operator not positive definite?)")]
    NoKktPoint,
    #[error("active-set enumeration found distinct KKT points; instance is numerically ill-posed")]
    AmbiguousKkt,
    #[error("comparison needs at least one approximation pair")]
    NoPairs,
}

pub type Result<T> = std::result::Result<T, Error>;
