//! Independent verification oracles: exhaustive active-set enumeration for
//! tiny bound-constrained quadratic programs, and a finite-difference check
//! of the energy gradient. These never share code with the iterative
//! solvers they certify.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::Grid;
use crate::solver::{assemble, ObstacleProblem};

const ENUMERATION_LIMIT: usize = 16;
const FEAS_TOL: f64 = 1e-12;
const DEGENERATE_TOL: f64 = 1e-10;

/// Dense image of the discrete obstacle problem on its interior unknowns.
#[derive(Debug, Clone)]
pub struct DenseQp {
    h: DMatrix<f64>,
    b: DVector<f64>,
    lower: DVector<f64>,
    nodes: Vec<usize>,
    grid: Option<Grid>,
}

impl DenseQp {
    /// Plain algebraic instance: minimize `1/2 u' H u - b' u` over `u >= lower`.
    pub fn new(h: DMatrix<f64>, b: Vec<f64>, lower: Vec<f64>) -> Result<Self> {
        let n = b.len();
        assert_eq!(h.nrows(), n);
        assert_eq!(h.ncols(), n);
        assert_eq!(lower.len(), n);
        if n > ENUMERATION_LIMIT {
            return Err(Error::TooLargeForOracle {
                unknowns: n,
                limit: ENUMERATION_LIMIT,
            });
        }
        Ok(DenseQp {
            h,
            b: DVector::from_vec(b),
            lower: DVector::from_vec(lower),
            nodes: (0..n).collect(),
            grid: None,
        })
    }

    /// Reduce an obstacle problem to its interior unknowns.
    pub fn from_problem(problem: &ObstacleProblem) -> Result<Self> {
        let (op, b_full) = assemble(problem);
        let nodes = op.interior().to_vec();
        if nodes.len() > ENUMERATION_LIMIT {
            return Err(Error::TooLargeForOracle {
                unknowns: nodes.len(),
                limit: ENUMERATION_LIMIT,
            });
        }
        let h = op.assemble_dense_interior();
        let b = nodes.iter().map(|&i| b_full[i]).collect();
        let lower = nodes
            .iter()
            .map(|&i| problem.obstacle().values()[i])
            .collect();
        let mut qp = DenseQp::new(h, b, lower)?;
        qp.nodes = nodes;
        qp.grid = Some(problem.grid().clone());
        Ok(qp)
    }

    pub fn unknowns(&self) -> usize {
        self.b.len()
    }

    /// Grid nodes behind the unknowns (identity mapping for plain instances).
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Embed interior values into a full clamped field (problem-backed
    /// instances only).
    pub fn expand(&self, interior_values: &[f64]) -> ScalarField {
        let grid = self
            .grid
            .clone()
            .expect("expand needs a problem-backed instance");
        let mut field = ScalarField::zeros(grid);
        for (k, &node) in self.nodes.iter().enumerate() {
            field.values_mut()[node] = interior_values[k];
        }
        field
    }
}

/// KKT point found by enumeration.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub u: Vec<f64>,
    /// Algebraic multiplier `Hu - b` (zero off the active set).
    pub multiplier: Vec<f64>,
    /// Indices of active unknowns, ascending.
    pub active: Vec<usize>,
}

/// Enumerate all `2^n` active sets and return the unique KKT point of the
/// strictly convex program. Degenerate representations of the same point
/// (active constraints with zero multiplier) are accepted as one solution;
/// genuinely distinct KKT points signal a broken instance.
pub fn brute_force_qp(qp: &DenseQp) -> Result<OracleSolution> {
    let n = qp.unknowns();
    let mut found: Option<OracleSolution> = None;
    for mask in 0u64..(1u64 << n) {
        let active: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let inactive: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) == 0).collect();

        let mut u = DVector::zeros(n);
        for &i in &active {
            u[i] = qp.lower[i];
        }
        if !inactive.is_empty() {
            let m = inactive.len();
            let mut h_ii = DMatrix::zeros(m, m);
            let mut rhs = DVector::zeros(m);
            for (a, &i) in inactive.iter().enumerate() {
                rhs[a] = qp.b[i];
                for &j in &active {
                    rhs[a] -= qp.h[(i, j)] * qp.lower[j];
                }
                for (c, &j) in inactive.iter().enumerate() {
                    h_ii[(a, c)] = qp.h[(i, j)];
                }
            }
            let Some(chol) = h_ii.cholesky() else {
                return Err(Error::NotSpd(
                    "a principal block of the oracle operator is not positive definite".into(),
                ));
            };
            let sol = chol.solve(&rhs);
            for (a, &i) in inactive.iter().enumerate() {
                u[i] = sol[a];
            }
        }

        // primal feasibility off the active set
        if inactive.iter().any(|&i| u[i] < qp.lower[i] - FEAS_TOL) {
            continue;
        }
        // multiplier sign on the active set
        let residual = &qp.h * &u - &qp.b;
        if active.iter().any(|&i| residual[i] < -FEAS_TOL) {
            continue;
        }

        let mut multiplier = vec![0.0; n];
        for &i in &active {
            multiplier[i] = residual[i];
        }
        let candidate = OracleSolution {
            u: u.iter().cloned().collect(),
            multiplier,
            active,
        };
        match &found {
            None => found = Some(candidate),
            Some(first) => {
                let same = first
                    .u
                    .iter()
                    .zip(&candidate.u)
                    .all(|(a, b)| (a - b).abs() <= DEGENERATE_TOL);
                if !same {
                    return Err(Error::AmbiguousKkt);
                }
                // keep the smallest-index active set (found first)
            }
        }
    }
    found.ok_or(Error::NoKktPoint)
}

/// Compare the analytic directional derivative of the energy with central
/// differences. The energy is quadratic, so the differences are exact up
/// to roundoff for every step size; returns the worst relative error.
pub fn gradient_check(
    problem: &ObstacleProblem,
    v: &ScalarField,
    direction: &ScalarField,
    step_sizes: &[f64],
) -> Result<f64> {
    v.require_clamped()?;
    direction.require_clamped()?;
    let (op, b) = assemble(problem);
    let n = problem.grid().node_count();
    let mut s = op.scratch();
    let mut hv = vec![0.0; n];
    op.apply_full(v.values(), &mut hv, &mut s);
    let analytic: f64 = direction
        .values()
        .iter()
        .enumerate()
        .map(|(i, &w)| w * (hv[i] - b[i]))
        .sum();
    let mut worst: f64 = 0.0;
    for &eps in step_sizes {
        let plus = problem.energy(&v.add_scaled(eps, direction)?)?;
        let minus = problem.energy(&v.add_scaled(-eps, direction)?)?;
        let numeric = (plus - minus) / (2.0 * eps);
        worst = worst.max((numeric - analytic).abs() / (1.0 + analytic.abs()));
    }
    Ok(worst)
}
