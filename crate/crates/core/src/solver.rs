//! The discrete obstacle problem for the clamped plate energy and its
//! bound-constrained solvers.
//!
//! The energy `J(v) = 1/2 (Hv, v) - (b, v)` is minimized over clamped
//! nodal fields with `v >= phi` at the interior nodes; boundary values are
//! pinned at zero, so the obstacle multiplier lives on interior nodes and
//! is zero on the boundary by convention (boundary rows of `Hu - b` are
//! clamp reactions, not obstacle forces).

use crate::coeff::{ApplyMode, CoefficientTensor};
use crate::error::{Error, Result};
use crate::field::{ScalarField, TensorField};
use crate::grid::Grid;
use crate::operators::{hessian, EnergyOperator};

/// Problem data: load, obstacle, coefficient tensor, clamped boundary.
#[derive(Debug, Clone)]
pub struct ObstacleProblem {
    grid: Grid,
    load: ScalarField,
    obstacle: ScalarField,
    coeff: CoefficientTensor,
}

impl ObstacleProblem {
    /// Validates grids, coefficient admissibility and the boundary sign of
    /// the obstacle (`phi <= 0` on the boundary, otherwise no clamped field
    /// can be feasible).
    pub fn new(load: ScalarField, obstacle: ScalarField, coeff: CoefficientTensor) -> Result<Self> {
        if load.grid() != obstacle.grid() {
            return Err(Error::GridMismatch);
        }
        let grid = load.grid().clone();
        coeff.validate_for(&grid)?;
        for node in 0..grid.node_count() {
            if grid.is_boundary(node) && obstacle.values()[node] > 0.0 {
                return Err(Error::Infeasible {
                    node,
                    value: obstacle.values()[node],
                });
            }
        }
        Ok(ObstacleProblem {
            grid,
            load,
            obstacle,
            coeff,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn load(&self) -> &ScalarField {
        &self.load
    }

    pub fn obstacle(&self) -> &ScalarField {
        &self.obstacle
    }

    pub fn coefficient(&self) -> &CoefficientTensor {
        &self.coeff
    }

    pub fn operator(&self) -> EnergyOperator {
        EnergyOperator::new(self.grid.clone(), self.coeff.clone())
            .expect("validated at construction")
    }

    /// Default activity threshold, relative to the obstacle scale.
    pub fn default_epsilon_active(&self) -> f64 {
        1e-7 * (1.0 + self.obstacle.max_abs())
    }

    /// Default admissibility tolerance for dual fields.
    pub fn default_admissibility_tol(&self) -> f64 {
        1e-10 * (1.0 + self.load.max_abs())
    }

    /// Energy `J(v)` of a clamped field.
    pub fn energy(&self, v: &ScalarField) -> Result<f64> {
        v.require_clamped()?;
        if v.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let hv = hessian(v)?;
        let quad = self.coeff.weighted_norm_sq(&hv, ApplyMode::Direct)?;
        Ok(0.5 * quad - self.load.dot(v)?)
    }
}

/// The discrete energy as a quadratic form: the weighted operator plus the
/// weighted load vector `b = W_V f`.
pub fn assemble(problem: &ObstacleProblem) -> (EnergyOperator, Vec<f64>) {
    let op = problem.operator();
    let b = problem
        .load()
        .values()
        .iter()
        .enumerate()
        .map(|(i, &f)| problem.grid().weight(i) * f)
        .collect();
    (op, b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ProjectedGradient,
    Psor,
}

/// Solver options. Defaults follow the problem dimension.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub method: Method,
    /// Convergence threshold on the max-norm of the KKT residual vector.
    pub tol: f64,
    pub max_iter: usize,
    /// Activity threshold; `None` uses the problem default.
    pub epsilon_active: Option<f64>,
}

impl SolveOptions {
    pub fn for_dim(dim: usize) -> Self {
        SolveOptions {
            method: Method::ProjectedGradient,
            tol: 1e-9,
            max_iter: if dim == 1 { 200_000 } else { 500_000 },
            epsilon_active: None,
        }
    }
}

/// The four KKT residuals of a primal/multiplier pair. All residuals are
/// nonnegative; the solver terminates when their maximum drops below the
/// requested tolerance.
#[derive(Debug, Clone, Copy, Default)]
pub struct KktReport {
    /// max over inactive interior nodes of the quadrature-normalized
    /// gradient |(Hu - b)_i / w_i|.
    pub stationarity: f64,
    /// max over nodes of (phi - u)_+.
    pub feasibility: f64,
    /// weighted absolute complementarity sum over interior nodes.
    pub complementarity: f64,
    /// max over active interior nodes of (-lambda)_+.
    pub multiplier_sign: f64,
}

impl KktReport {
    pub fn max(&self) -> f64 {
        self.stationarity
            .max(self.feasibility)
            .max(self.complementarity)
            .max(self.multiplier_sign)
    }
}

/// Converged (or best-effort) primal solution with multiplier, coincidence
/// partition and KKT certificate.
#[derive(Debug, Clone)]
pub struct PrimalSolution {
    pub u: ScalarField,
    /// Nodal obstacle multiplier: `(Hu - b)_i / w_i` at interior nodes,
    /// zero at boundary nodes.
    pub multiplier: ScalarField,
    pub active: Vec<usize>,
    pub inactive: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    pub kkt: KktReport,
    pub epsilon_active: f64,
}

/// Partition nodes into the coincidence set `{u - phi <= eps}` and its
/// complement, in node order.
pub fn coincidence_set(
    u: &ScalarField,
    obstacle: &ScalarField,
    epsilon_active: f64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if u.grid() != obstacle.grid() {
        return Err(Error::GridMismatch);
    }
    let mut active = Vec::new();
    let mut inactive = Vec::new();
    for i in 0..u.grid().node_count() {
        if u.values()[i] - obstacle.values()[i] <= epsilon_active {
            active.push(i);
        } else {
            inactive.push(i);
        }
    }
    Ok((active, inactive))
}

fn kkt_from_gradient(
    grid: &Grid,
    v: &[f64],
    grad: &[f64],
    phi: &[f64],
    eps_active: f64,
) -> KktReport {
    let mut report = KktReport::default();
    for i in 0..grid.node_count() {
        let gap = v[i] - phi[i];
        report.feasibility = report.feasibility.max(-gap);
        if grid.is_boundary(i) {
            continue;
        }
        let lambda = grad[i] / grid.weight(i);
        if gap <= eps_active {
            report.multiplier_sign = report.multiplier_sign.max(-lambda);
        } else {
            report.stationarity = report.stationarity.max(lambda.abs());
        }
        report.complementarity += grid.weight(i) * (lambda * gap).abs();
    }
    report.feasibility = report.feasibility.max(0.0);
    report.multiplier_sign = report.multiplier_sign.max(0.0);
    report
}

/// KKT residuals of an arbitrary primal/multiplier pair; pure function of
/// its inputs (the gradient is recomputed from `u`).
pub fn kkt_report(
    u: &ScalarField,
    multiplier: &ScalarField,
    problem: &ObstacleProblem,
    epsilon_active: f64,
) -> Result<KktReport> {
    u.require_clamped()?;
    if u.grid() != problem.grid() || multiplier.grid() != problem.grid() {
        return Err(Error::GridMismatch);
    }
    let (op, b) = assemble(problem);
    let grid = problem.grid();
    let mut s = op.scratch();
    let mut hu = vec![0.0; grid.node_count()];
    op.apply_full(u.values(), &mut hu, &mut s);
    let mut report = KktReport::default();
    let phi = problem.obstacle().values();
    for i in 0..grid.node_count() {
        let gap = u.values()[i] - phi[i];
        report.feasibility = report.feasibility.max(-gap);
        if grid.is_boundary(i) {
            continue;
        }
        let grad_lambda = (hu[i] - b[i]) / grid.weight(i);
        let lambda = multiplier.values()[i];
        if gap <= epsilon_active {
            report.multiplier_sign = report.multiplier_sign.max(-lambda);
        } else {
            report.stationarity = report.stationarity.max(grad_lambda.abs());
        }
        report.complementarity += grid.weight(i) * (lambda * gap).abs();
    }
    report.feasibility = report.feasibility.max(0.0);
    report.multiplier_sign = report.multiplier_sign.max(0.0);
    Ok(report)
}

/// Minimize the energy over the constraint set. Non-convergence within
/// `max_iter` returns the best iterate with `converged = false`; an
/// infeasible problem is an error.
pub fn solve_primal(problem: &ObstacleProblem, opts: &SolveOptions) -> Result<PrimalSolution> {
    solve_primal_impl(problem, opts, None).map(|(s, _)| s)
}

/// As [`solve_primal`], additionally recording the energy after every
/// iteration (used by the descent tests).
pub fn solve_primal_traced(
    problem: &ObstacleProblem,
    opts: &SolveOptions,
) -> Result<(PrimalSolution, Vec<f64>)> {
    let mut trace = Vec::new();
    let (solution, _) = solve_primal_impl(problem, opts, Some(&mut trace))?;
    Ok((solution, trace))
}

fn solve_primal_impl(
    problem: &ObstacleProblem,
    opts: &SolveOptions,
    mut energy_trace: Option<&mut Vec<f64>>,
) -> Result<(PrimalSolution, ())> {
    let grid = problem.grid().clone();
    let n = grid.node_count();
    let phi = problem.obstacle().values().to_vec();
    let eps_active = opts
        .epsilon_active
        .unwrap_or_else(|| problem.default_epsilon_active());
    let (op, b) = assemble(problem);

    // Feasibility witness: project the zero field onto the constraint set.
    // Interior nodes can always be lifted to phi; boundary nodes are pinned
    // at zero, which ObstacleProblem::new already checked against phi.
    let mut v: Vec<f64> = (0..n)
        .map(|i| {
            if grid.is_boundary(i) {
                0.0
            } else {
                phi[i].max(0.0)
            }
        })
        .collect();
    for i in 0..n {
        if v[i] < phi[i] {
            return Err(Error::Infeasible {
                node: i,
                value: phi[i],
            });
        }
    }

    let mut s = op.scratch();
    let mut grad = vec![0.0; n];
    let mut hv = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;

    match opts.method {
        Method::ProjectedGradient => {
            let step = 1.0 / op.lipschitz_bound();
            for iter in 0..opts.max_iter {
                op.apply_full(&v, &mut hv, &mut s);
                for i in 0..n {
                    grad[i] = hv[i] - b[i];
                }
                if let Some(trace) = energy_trace.as_deref_mut() {
                    let quad: f64 = v.iter().zip(&hv).map(|(a, b)| a * b).sum();
                    let lin: f64 = v.iter().zip(&b).map(|(a, b)| a * b).sum();
                    trace.push(0.5 * quad - lin);
                }
                let report = kkt_from_gradient(&grid, &v, &grad, &phi, eps_active);
                iterations = iter;
                if report.max() <= opts.tol {
                    converged = true;
                    break;
                }
                let mut changed = false;
                for i in 0..n {
                    if grid.is_boundary(i) {
                        continue;
                    }
                    let next = (v[i] - step * grad[i]).max(phi[i]);
                    if next != v[i] {
                        v[i] = next;
                        changed = true;
                    }
                }
                // bitwise fixed point: further iterations cannot improve
                if !changed {
                    break;
                }
            }
        }
        Method::Psor => {
            const OMEGA: f64 = 1.5;
            let interior = op.interior().to_vec();
            let h_dense = op.assemble_dense_interior();
            let m = interior.len();
            let b_int: Vec<f64> = interior.iter().map(|&i| b[i]).collect();
            let phi_int: Vec<f64> = interior.iter().map(|&i| phi[i]).collect();
            let mut x: Vec<f64> = interior.iter().map(|&i| v[i]).collect();
            for sweep in 0..opts.max_iter {
                let mut changed = false;
                for i in 0..m {
                    let row = h_dense.row(i);
                    let mut sigma = b_int[i];
                    for j in 0..m {
                        if j != i {
                            sigma -= row[j] * x[j];
                        }
                    }
                    let gs = sigma / h_dense[(i, i)];
                    let next = ((1.0 - OMEGA) * x[i] + OMEGA * gs).max(phi_int[i]);
                    if next != x[i] {
                        x[i] = next;
                        changed = true;
                    }
                }
                for (k, &node) in interior.iter().enumerate() {
                    v[node] = x[k];
                }
                op.apply_full(&v, &mut hv, &mut s);
                for i in 0..n {
                    grad[i] = hv[i] - b[i];
                }
                if let Some(trace) = energy_trace.as_deref_mut() {
                    let quad: f64 = v.iter().zip(&hv).map(|(a, b)| a * b).sum();
                    let lin: f64 = v.iter().zip(&b).map(|(a, b)| a * b).sum();
                    trace.push(0.5 * quad - lin);
                }
                let report = kkt_from_gradient(&grid, &v, &grad, &phi, eps_active);
                iterations = sweep;
                if report.max() <= opts.tol {
                    converged = true;
                    break;
                }
                if !changed {
                    break;
                }
            }
        }
    }

    // Final gradient, multiplier and partition from the returned iterate.
    op.apply_full(&v, &mut hv, &mut s);
    for i in 0..n {
        grad[i] = hv[i] - b[i];
    }
    let kkt = kkt_from_gradient(&grid, &v, &grad, &phi, eps_active);
    converged = converged || kkt.max() <= opts.tol;
    let mut multiplier = vec![0.0; n];
    for i in 0..n {
        if !grid.is_boundary(i) {
            multiplier[i] = grad[i] / grid.weight(i);
        }
    }
    let u = ScalarField::new(grid.clone(), v)?;
    let multiplier = ScalarField::new(grid.clone(), multiplier)?;
    let (active, inactive) = coincidence_set(&u, problem.obstacle(), eps_active)?;
    Ok((
        PrimalSolution {
            u,
            multiplier,
            active,
            inactive,
            iterations: iterations + 1,
            converged,
            kkt,
            epsilon_active: eps_active,
        },
        (),
    ))
}

/// Exact dual field of a primal candidate: `A` applied to its Hessian.
/// For the solved `u` this is the maximizer of the dual problem, and
/// `div_div(p) - f` reproduces the multiplier at interior nodes.
pub fn recover_dual(u: &ScalarField, problem: &ObstacleProblem) -> Result<TensorField> {
    if u.grid() != problem.grid() {
        return Err(Error::GridMismatch);
    }
    let hu = hessian(u)?;
    problem.coefficient().apply(&hu, ApplyMode::Direct)
}
