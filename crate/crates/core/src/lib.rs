//! Finite-difference toolkit for clamped plate obstacle problems with
//! guaranteed a posteriori error control.
//!
//! The crate discretizes the fourth-order obstacle problem on uniform box
//! grids, solves the resulting bound-constrained quadratic program, and
//! evaluates an exact deviation identity term by term: for any approximate
//! primal/dual pair it produces the energy error split, a computable
//! guaranteed majorant, and the duality gap. The discrete divergence
//! operator is the exact quadrature-weighted adjoint of the discrete
//! Hessian, which makes every identity checked here exact to rounding
//! rather than up to discretization error.
//!
//! Modules map onto the moving parts:
//! - [`grid`], [`field`]: tensor-product grids, nodal fields, quadrature;
//! - [`coeff`]: the coefficient tensor and its weighted norms;
//! - [`operators`]: Hessian, its adjoint, coercivity constant;
//! - [`solver`]: the obstacle QP (projected gradient / PSOR) with KKT
//!   certificates;
//! - [`dual`]: flux reconstruction into the admissible dual set;
//! - [`deviation`]: the identity terms, majorant, dual objective, ranking;
//! - [`oracle`]: brute-force enumeration and finite-difference checks;
//! - [`testing`]: seeded field generators for tests and benchmarks.

pub mod coeff;
pub mod deviation;
pub mod dual;
pub mod error;
pub mod field;
pub mod grid;
mod linalg;
pub mod operators;
pub mod oracle;
pub mod solver;
pub mod testing;

pub use coeff::{ApplyMode, CoefficientTensor};
pub use deviation::{
    biharmonic_terms, compare_approximations, deviation_terms, deviation_terms_l2, dual_feasible,
    dual_objective, majorant, majorant_value, ApproximationPair, BiharmonicReport, DeviationReport,
    DualObjective, RankedPair,
};
pub use dual::{feasible_flux, naive_flux};
pub use error::{Error, Result};
pub use field::{ScalarField, TensorField};
pub use grid::{Axis, Grid};
pub use operators::{
    coercivity_constant, div_div, hessian, lowest_clamped_modes, ClampedBoundary, CoercivityMode,
    EnergyOperator,
};
pub use oracle::{brute_force_qp, gradient_check, DenseQp, OracleSolution};
pub use solver::{
    assemble, coincidence_set, kkt_report, recover_dual, solve_primal, solve_primal_traced,
    KktReport, Method, ObstacleProblem, PrimalSolution, SolveOptions,
};
