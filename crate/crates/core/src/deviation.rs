//! Term-by-term evaluation of the deviation identity, its decomposition
//! for the obstacle problem, the computable error majorant, and the dual
//! objective.
//!
//! For any clamped `v` and any tensor field `y`, with `u` the exact
//! minimizer and `p` its flux, the four quantities
//!
//! ```text
//!   E_v = 1/2 |L(v-u)|_A^2      E_y = 1/2 |p - y|_{A^{-1}}^2
//!   M_K = (L(v-u), p - y)       RHS = 1/2 |A L v - y|_{A^{-1}}^2
//! ```
//!
//! satisfy `E_v + E_y + M_K = RHS` exactly; every term here is computed
//! independently from its definition so the residual of the identity is a
//! genuine floating-point measurement, not an algebraic tautology.
//!
//! Splitting `M_K` along the coincidence partition turns the identity into
//! the obstacle-problem decomposition whose right side is computable and
//! whose left side is a sum of nonnegative terms once `v` respects the
//! obstacle and `y` is admissible. Discretely the obstacle multiplier
//! absorbs both the coincidence-set volume term and the free-boundary jump
//! term, and the constraint-related sums run over interior nodes (the
//! discrete counterpart of "almost everywhere in the open domain"; the
//! boundary contributions cancel identically between the two sides).

use rayon::prelude::*;

use crate::coeff::ApplyMode;
use crate::error::{Error, Result};
use crate::field::{ScalarField, TensorField};
use crate::operators::{div_div, hessian};
use crate::solver::{recover_dual, ObstacleProblem, PrimalSolution};

/// The four terms of the deviation identity plus the evaluated residual.
#[derive(Debug, Clone, Copy)]
pub struct DeviationReport {
    /// Primal deviation `1/2 |L(v-u)|_A^2`.
    pub e_v: f64,
    /// Dual deviation `1/2 |p - y|_{A^{-1}}^2`.
    pub e_y: f64,
    /// Mixed pairing `(L(v-u), p - y)`; carries no coefficient tensor.
    pub m_k: f64,
    /// Computable right side `1/2 |A L v - y|_{A^{-1}}^2`.
    pub rhs: f64,
    /// Equivalent right-side norm `1/2 |L v - A^{-1} y|_A^2`.
    pub rhs_alt: f64,
    /// `|e_v + e_y + m_k - rhs|`.
    pub residual: f64,
}

/// Evaluate the deviation identity for an arbitrary pair `(v, y)` against
/// an exact pair `(u, p)` with `p = A L u`. Holds for any fields on the
/// problem grid, constrained or not.
pub fn deviation_terms(
    v: &ScalarField,
    y: &TensorField,
    u: &ScalarField,
    p: &TensorField,
    problem: &ObstacleProblem,
) -> Result<DeviationReport> {
    let grid = problem.grid();
    if v.grid() != grid || y.grid() != grid || u.grid() != grid || p.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let a = problem.coefficient();
    let diff = hessian(&v.sub(u)?)?;
    let e_v = 0.5 * a.weighted_norm_sq(&diff, ApplyMode::Direct)?;
    let dual_diff = p.sub(y)?;
    let e_y = 0.5 * a.weighted_norm_sq(&dual_diff, ApplyMode::Inverse)?;
    let m_k = diff.inner(&dual_diff)?;
    let flux_misfit = a.apply(&hessian(v)?, ApplyMode::Direct)?.sub(y)?;
    let rhs = 0.5 * a.weighted_norm_sq(&flux_misfit, ApplyMode::Inverse)?;
    let alt_misfit = hessian(v)?.sub(&a.apply(y, ApplyMode::Inverse)?)?;
    let rhs_alt = 0.5 * a.weighted_norm_sq(&alt_misfit, ApplyMode::Direct)?;
    let residual = (e_v + e_y + m_k - rhs).abs();
    Ok(DeviationReport {
        e_v,
        e_y,
        m_k,
        rhs,
        rhs_alt,
        residual,
    })
}

/// Plain-L2 evaluation of the identity, free of any coefficient tensor.
/// The mixed pairing is summed by an explicit nodal loop, so this is an
/// independent code path for the no-tensor case.
pub fn deviation_terms_l2(
    v: &ScalarField,
    y: &TensorField,
    u: &ScalarField,
    p: &TensorField,
) -> Result<DeviationReport> {
    let grid = v.grid().clone();
    if y.grid() != &grid || u.grid() != &grid || p.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    let diff = hessian(&v.sub(u)?)?;
    let dual_diff = p.sub(y)?;
    let e_v = 0.5 * diff.norm_sq();
    let e_y = 0.5 * dual_diff.norm_sq();
    let m = grid.tensor_components();
    let mut m_k = 0.0;
    for node in 0..grid.node_count() {
        let w = grid.weight(node);
        let mut c = diff.get(node, 0) * dual_diff.get(node, 0);
        if m == 3 {
            c += diff.get(node, 1) * dual_diff.get(node, 1);
            c += 2.0 * diff.get(node, 2) * dual_diff.get(node, 2);
        }
        m_k += w * c;
    }
    let misfit = hessian(v)?.sub(y)?;
    let rhs = 0.5 * misfit.norm_sq();
    let residual = (e_v + e_y + m_k - rhs).abs();
    Ok(DeviationReport {
        e_v,
        e_y,
        m_k,
        rhs,
        rhs_alt: rhs,
        residual,
    })
}

/// The obstacle-problem decomposition of the identity.
#[derive(Debug, Clone, Copy)]
pub struct BiharmonicReport {
    /// `1/2 |L(v-u)|_A^2` -- the energy error of `v`.
    pub error_term: f64,
    /// Constraint deviation of `v`, through the nodal multiplier.
    pub mu_phi: f64,
    /// `1/2 |p - y|_{A^{-1}}^2`.
    pub dual_term: f64,
    /// Constraint deviation of `y` on the inactive interior nodes.
    pub mu_star_phi: f64,
    /// `1/2 |A L v - y|_{A^{-1}}^2`.
    pub rhs_norm: f64,
    /// Obstacle penalty integral over the interior nodes.
    pub penalty: f64,
    /// Residual of the decomposition.
    pub residual: f64,
    /// Membership of `y` in the admissible dual set (default tolerance).
    pub admissible: bool,
}

impl BiharmonicReport {
    /// Smallest of the six terms; nonnegative for admissible pairs.
    pub fn min_term(&self) -> f64 {
        self.error_term
            .min(self.mu_phi)
            .min(self.dual_term)
            .min(self.mu_star_phi)
            .min(self.rhs_norm)
            .min(self.penalty)
    }
}

/// Evaluate the decomposition for `(v, y)` against a converged solution.
/// Its residual is exact up to the solver's KKT residual entering through
/// the multiplier and the coincidence partition.
pub fn biharmonic_terms(
    v: &ScalarField,
    y: &TensorField,
    solution: &PrimalSolution,
    problem: &ObstacleProblem,
) -> Result<BiharmonicReport> {
    let grid = problem.grid();
    if v.grid() != grid || y.grid() != grid || solution.u.grid() != grid {
        return Err(Error::GridMismatch);
    }
    v.require_clamped()?;
    let a = problem.coefficient();
    let u = &solution.u;
    let p = recover_dual(u, problem)?;

    let diff = hessian(&v.sub(u)?)?;
    let error_term = 0.5 * a.weighted_norm_sq(&diff, ApplyMode::Direct)?;
    let dual_term = 0.5 * a.weighted_norm_sq(&p.sub(y)?, ApplyMode::Inverse)?;
    let rhs_norm = {
        let misfit = a.apply(&hessian(v)?, ApplyMode::Direct)?.sub(y)?;
        0.5 * a.weighted_norm_sq(&misfit, ApplyMode::Inverse)?
    };

    let phi = problem.obstacle().values();
    let f = problem.load().values();
    let lambda = solution.multiplier.values();
    let dd = div_div(y);

    let mut mu_phi = 0.0;
    for &i in &solution.active {
        mu_phi += grid.weight(i) * (v.values()[i] - phi[i]) * lambda[i];
    }
    let mut mu_star_phi = 0.0;
    for &i in &solution.inactive {
        if !grid.is_boundary(i) {
            mu_star_phi += grid.weight(i) * (u.values()[i] - phi[i]) * (dd.values()[i] - f[i]);
        }
    }
    let mut penalty = 0.0;
    for i in 0..grid.node_count() {
        if !grid.is_boundary(i) {
            penalty += grid.weight(i) * (phi[i] - v.values()[i]) * (f[i] - dd.values()[i]);
        }
    }

    let residual = (error_term + mu_phi + dual_term + mu_star_phi - rhs_norm - penalty).abs();
    let (admissible, _) = dual_feasible(y, problem, problem.default_admissibility_tol())?;
    Ok(BiharmonicReport {
        error_term,
        mu_phi,
        dual_term,
        mu_star_phi,
        rhs_norm,
        penalty,
        residual,
        admissible,
    })
}

/// Test membership in the admissible dual set: `f - div_div(y) <= tol` at
/// every interior node. Returns the nodal violation field (positive parts,
/// zero on the boundary) for diagnostics.
pub fn dual_feasible(
    y: &TensorField,
    problem: &ObstacleProblem,
    tol: f64,
) -> Result<(bool, ScalarField)> {
    let grid = problem.grid();
    if y.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let dd = div_div(y);
    let mut violation = ScalarField::zeros(grid.clone());
    let mut worst = 0.0_f64;
    for i in 0..grid.node_count() {
        if grid.is_boundary(i) {
            continue;
        }
        let g = problem.load().values()[i] - dd.values()[i];
        if g > 0.0 {
            violation.values_mut()[i] = g;
            worst = worst.max(g);
        }
    }
    Ok((worst <= tol, violation))
}

fn penalty_term(v: &ScalarField, y: &TensorField, problem: &ObstacleProblem) -> f64 {
    let grid = problem.grid();
    let dd = div_div(y);
    let mut penalty = 0.0;
    for i in 0..grid.node_count() {
        if !grid.is_boundary(i) {
            penalty += grid.weight(i)
                * (problem.obstacle().values()[i] - v.values()[i])
                * (problem.load().values()[i] - dd.values()[i]);
        }
    }
    penalty
}

/// The computable bound without any admissibility guarantee; only for
/// flagged diagnostic output.
pub fn majorant_value(v: &ScalarField, y: &TensorField, problem: &ObstacleProblem) -> Result<f64> {
    let a = problem.coefficient();
    let misfit = a.apply(&hessian(v)?, ApplyMode::Direct)?.sub(y)?;
    let rhs_norm = 0.5 * a.weighted_norm_sq(&misfit, ApplyMode::Inverse)?;
    Ok(rhs_norm + penalty_term(v, y, problem))
}

/// Guaranteed error majorant: for `v` above the obstacle and admissible
/// `y`, the energy error of `v` is bounded by the returned value. Inputs
/// violating either precondition are refused, because the bound is not
/// guaranteed for them.
pub fn majorant(v: &ScalarField, y: &TensorField, problem: &ObstacleProblem) -> Result<f64> {
    v.require_clamped()?;
    if v.grid() != problem.grid() {
        return Err(Error::GridMismatch);
    }
    let feas_tol = 1e-12 * (1.0 + problem.obstacle().max_abs());
    let worst_gap = v
        .values()
        .iter()
        .zip(problem.obstacle().values())
        .map(|(a, b)| a - b)
        .fold(f64::INFINITY, f64::min);
    if worst_gap < -feas_tol {
        return Err(Error::OutsideConstraintSet {
            violation: worst_gap,
        });
    }
    let tol = problem.default_admissibility_tol();
    let (ok, violation) = dual_feasible(y, problem, tol)?;
    if !ok {
        return Err(Error::InadmissibleDual {
            violation: violation.max_abs(),
            tol,
        });
    }
    majorant_value(v, y, problem)
}

/// Value of the dual objective at `y`, `-inf` (flagged) when `y` is not
/// admissible and the defining supremum diverges.
#[derive(Debug, Clone, Copy)]
pub struct DualObjective {
    pub feasible: bool,
    pub value: f64,
}

/// The dual objective in closed form: for admissible `y` the inner
/// supremum over the constraint set is attained at the obstacle, giving
/// `-1/2 |y|_{A^{-1}}^2 - sum_interior w phi (f - div_div y)`.
pub fn dual_objective(y: &TensorField, problem: &ObstacleProblem) -> Result<DualObjective> {
    let grid = problem.grid();
    if y.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let tol = problem.default_admissibility_tol();
    let (feasible, _) = dual_feasible(y, problem, tol)?;
    if !feasible {
        return Ok(DualObjective {
            feasible: false,
            value: f64::NEG_INFINITY,
        });
    }
    let a = problem.coefficient();
    let quad = 0.5 * a.weighted_norm_sq(y, ApplyMode::Inverse)?;
    let dd = div_div(y);
    let mut obstacle_term = 0.0;
    for i in 0..grid.node_count() {
        if !grid.is_boundary(i) {
            obstacle_term += grid.weight(i)
                * problem.obstacle().values()[i]
                * (problem.load().values()[i] - dd.values()[i]);
        }
    }
    Ok(DualObjective {
        feasible: true,
        value: -quad - obstacle_term,
    })
}

/// A named primal/dual approximation pair.
#[derive(Debug, Clone)]
pub struct ApproximationPair {
    pub name: String,
    pub primal: ScalarField,
    pub dual: TensorField,
}

/// Everything the comparison knows about one pair.
#[derive(Debug, Clone)]
pub struct RankedPair {
    pub name: String,
    pub deviation: DeviationReport,
    pub decomposition: BiharmonicReport,
    /// Guaranteed bound; `None` when the pair failed a precondition and the
    /// forced value was not requested.
    pub majorant: Option<f64>,
    /// True energy error `1/2 |L(v-u)|_A^2`.
    pub true_error: f64,
    /// Both preconditions of the bound hold.
    pub admissible: bool,
    /// 1-based rank, ascending by majorant; unguaranteed pairs rank last.
    pub rank: usize,
}

/// Evaluate and rank approximation pairs by their majorant, ascending,
/// with ties and unguaranteed pairs kept in input order. Pairs evaluate in
/// parallel; the output order is deterministic.
pub fn compare_approximations(
    problem: &ObstacleProblem,
    solution: &PrimalSolution,
    pairs: &[ApproximationPair],
    force: bool,
) -> Result<Vec<RankedPair>> {
    if pairs.is_empty() {
        return Err(Error::NoPairs);
    }
    let exact_dual = recover_dual(&solution.u, problem)?;
    let evaluated: Vec<Result<RankedPair>> = pairs
        .par_iter()
        .map(|pair| {
            let deviation =
                deviation_terms(&pair.primal, &pair.dual, &solution.u, &exact_dual, problem)?;
            let decomposition = biharmonic_terms(&pair.primal, &pair.dual, solution, problem)?;
            let guaranteed = majorant(&pair.primal, &pair.dual, problem);
            let (admissible, majorant) = match guaranteed {
                Ok(value) => (true, Some(value)),
                Err(Error::InadmissibleDual { .. }) | Err(Error::OutsideConstraintSet { .. }) => {
                    let forced = if force {
                        Some(majorant_value(&pair.primal, &pair.dual, problem)?)
                    } else {
                        None
                    };
                    (false, forced)
                }
                Err(e) => return Err(e),
            };
            Ok(RankedPair {
                name: pair.name.clone(),
                deviation,
                decomposition,
                majorant,
                true_error: deviation.e_v,
                admissible,
                rank: 0,
            })
        })
        .collect();
    let mut rows = evaluated.into_iter().collect::<Result<Vec<_>>>()?;
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| {
        let key = |r: &RankedPair| {
            if r.admissible {
                r.majorant.unwrap_or(f64::INFINITY)
            } else {
                f64::INFINITY
            }
        };
        key(&rows[a])
            .partial_cmp(&key(&rows[b]))
            .expect("finite keys")
    });
    for (rank, &idx) in order.iter().enumerate() {
        rows[idx].rank = rank + 1;
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoefficientTensor;
    use crate::dual::feasible_flux;
    use crate::grid::Grid;
    use crate::operators::EnergyOperator;
    use crate::solver::{solve_primal, SolveOptions};
    use crate::testing;

    fn contact_problem(n: usize) -> ObstacleProblem {
        let g = Grid::line(0.0, 1.0, n).unwrap();
        ObstacleProblem::new(
            ScalarField::from_fn(g.clone(), |_, _| -5.0),
            ScalarField::from_fn(g, |_, _| -0.001),
            CoefficientTensor::identity(),
        )
        .unwrap()
    }

    fn solved(problem: &ObstacleProblem, tol: f64) -> PrimalSolution {
        let mut opts = SolveOptions::for_dim(problem.grid().dim());
        opts.tol = tol;
        opts.max_iter = 600_000;
        let sol = solve_primal(problem, &opts).unwrap();
        assert!(sol.converged, "kkt stalled at {:e}", sol.kkt.max());
        sol
    }

    /// Shared tightly-solved contact instance; the stationarity floor of
    /// this grid sits near 4e-12, so 5e-12 is reachable.
    fn corpus41() -> &'static (ObstacleProblem, PrimalSolution) {
        static CELL: std::sync::OnceLock<(ObstacleProblem, PrimalSolution)> =
            std::sync::OnceLock::new();
        CELL.get_or_init(|| {
            let p = contact_problem(41);
            let sol = solved(&p, 5e-12);
            assert!(!sol.active.is_empty(), "corpus problem must have contact");
            (p, sol)
        })
    }

    #[test]
    fn exact_pair_annihilates_every_term() {
        let g = Grid::line(0.0, 1.0, 13).unwrap();
        let mut rng = testing::rng(7);
        let a = testing::random_coefficient(&g, &mut rng);
        let p = ObstacleProblem::new(
            ScalarField::zeros(g.clone()),
            ScalarField::from_fn(g.clone(), |_, _| -1.0),
            a.clone(),
        )
        .unwrap();
        let u = testing::random_clamped(&g, &mut rng, true);
        let flux = crate::solver::recover_dual(&u, &p).unwrap();
        let report = deviation_terms(&u, &flux, &u, &flux, &p).unwrap();
        assert_eq!(report.e_v, 0.0);
        assert_eq!(report.e_y, 0.0);
        assert_eq!(report.m_k, 0.0);
        assert_eq!(report.rhs, 0.0);
    }

    #[test]
    fn perturbation_expansion_in_the_no_tensor_case() {
        let g = Grid::line(0.0, 1.0, 17).unwrap();
        let p = ObstacleProblem::new(
            ScalarField::zeros(g.clone()),
            ScalarField::from_fn(g.clone(), |_, _| -1.0),
            CoefficientTensor::identity(),
        )
        .unwrap();
        let mut rng = testing::rng(11);
        let u = testing::random_clamped(&g, &mut rng, true);
        let flux = crate::solver::recover_dual(&u, &p).unwrap();
        let w = testing::random_clamped(&g, &mut rng, true);
        let expected = 0.5 * hessian(&w).unwrap().norm_sq();
        let mut ratios = Vec::new();
        for eps in [1e-2, 1e-3] {
            let v = u.add_scaled(eps, &w).unwrap();
            let report = deviation_terms(&v, &flux, &u, &flux, &p).unwrap();
            assert_eq!(report.m_k, 0.0);
            assert_eq!(report.e_y, 0.0);
            assert!((report.e_v - report.rhs).abs() <= 1e-12 * (1.0 + report.rhs));
            ratios.push(report.rhs / (eps * eps));
        }
        assert!((ratios[0] - ratios[1]).abs() <= 1e-10 * ratios[0].abs());
        assert!((ratios[0] - expected).abs() <= 1e-8 * expected);
    }

    #[test]
    fn identity_residual_on_random_triples() {
        // The exact pair is kept at moderate scale; otherwise its huge
        // opposing contributions to both sides drown the residual in
        // cancellation noise that says nothing about the identity.
        let grids = [
            Grid::line(0.0, 1.0, 21).unwrap(),
            Grid::rectangle((0.0, 1.0), (0.0, 1.0), (11, 11)).unwrap(),
        ];
        let mut rng = testing::rng(23);
        for g in &grids {
            for trial in 0..25 {
                let a = testing::random_coefficient(g, &mut rng);
                let p = ObstacleProblem::new(
                    ScalarField::zeros(g.clone()),
                    ScalarField::from_fn(g.clone(), |_, _| -1.0),
                    a,
                )
                .unwrap();
                let mut u = testing::random_clamped(g, &mut rng, true);
                u.values_mut().iter_mut().for_each(|x| *x *= 0.05);
                let flux = crate::solver::recover_dual(&u, &p).unwrap();
                let v = testing::random_clamped(g, &mut rng, trial % 3 == 0);
                let y = testing::random_tensor(g, &mut rng);
                let report = deviation_terms(&v, &y, &u, &flux, &p).unwrap();
                assert!(
                    report.residual <= 1e-12 * (1.0 + report.rhs),
                    "trial {trial}: residual {:e} vs rhs {:e}",
                    report.residual,
                    report.rhs
                );
                assert!(
                    (report.rhs_alt - report.rhs).abs() <= 1e-12 * (1.0 + report.rhs),
                    "trial {trial}"
                );
            }
        }
    }

    #[test]
    fn mixed_pairing_is_tensor_independent() {
        let g = Grid::rectangle((0.0, 1.0), (0.0, 1.0), (9, 9)).unwrap();
        let mut rng = testing::rng(31);
        let a = testing::random_coefficient(&g, &mut rng);
        let p = ObstacleProblem::new(
            ScalarField::zeros(g.clone()),
            ScalarField::from_fn(g.clone(), |_, _| -1.0),
            a,
        )
        .unwrap();
        let u = testing::random_clamped(&g, &mut rng, true);
        let flux = crate::solver::recover_dual(&u, &p).unwrap();
        let v = testing::random_clamped(&g, &mut rng, false);
        let y = testing::random_tensor(&g, &mut rng);
        let weighted = deviation_terms(&v, &y, &u, &flux, &p).unwrap();
        let plain = deviation_terms_l2(&v, &y, &u, &flux).unwrap();
        assert!(
            (weighted.m_k - plain.m_k).abs() <= 1e-13 * (1.0 + plain.m_k.abs()),
            "{} vs {}",
            weighted.m_k,
            plain.m_k
        );
    }

    #[test]
    fn weighted_path_reduces_to_the_plain_path_for_identity() {
        let g = Grid::line(0.0, 1.0, 21).unwrap();
        let p = ObstacleProblem::new(
            ScalarField::zeros(g.clone()),
            ScalarField::from_fn(g.clone(), |_, _| -1.0),
            CoefficientTensor::identity(),
        )
        .unwrap();
        let mut rng = testing::rng(37);
        let u = testing::random_clamped(&g, &mut rng, true);
        let flux = crate::solver::recover_dual(&u, &p).unwrap();
        let v = testing::random_clamped(&g, &mut rng, false);
        let y = testing::random_tensor(&g, &mut rng);
        let weighted = deviation_terms(&v, &y, &u, &flux, &p).unwrap();
        let plain = deviation_terms_l2(&v, &y, &u, &flux).unwrap();
        for (a, b) in [
            (weighted.e_v, plain.e_v),
            (weighted.e_y, plain.e_y),
            (weighted.m_k, plain.m_k),
            (weighted.rhs, plain.rhs),
            (weighted.rhs_alt, plain.rhs_alt),
        ] {
            assert!((a - b).abs() <= 1e-13 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn dual_feasibility_examples() {
        let p = contact_problem(17);
        let g = p.grid().clone();
        // constructed equality case: div_div(y) = f at interior nodes
        let op = EnergyOperator::new(g.clone(), CoefficientTensor::identity()).unwrap();
        let rhs: Vec<f64> = op
            .interior()
            .iter()
            .map(|&i| g.weight(i) * p.load().values()[i])
            .collect();
        let w = op.solve_clamped(&rhs).unwrap();
        let y = hessian(&ScalarField::new(g.clone(), w).unwrap()).unwrap();
        let (ok, _) = dual_feasible(&y, &p, p.default_admissibility_tol()).unwrap();
        assert!(
            ok,
            "equality case sits on the boundary of the admissible set"
        );

        // zero flux against a negative load is infeasible with violation max(f)... here -f > 0
        let pos = ObstacleProblem::new(
            ScalarField::from_fn(g.clone(), |_, _| 2.0),
            ScalarField::from_fn(g.clone(), |_, _| -1.0),
            CoefficientTensor::identity(),
        )
        .unwrap();
        let (ok, violation) = dual_feasible(&TensorField::zeros(g), &pos, 1e-10).unwrap();
        assert!(!ok);
        assert!((violation.max_abs() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn decomposition_vanishes_on_the_exact_pair() {
        let (p, sol) = corpus41();
        let flux = crate::solver::recover_dual(&sol.u, p).unwrap();
        let report = biharmonic_terms(&sol.u, &flux, sol, p).unwrap();
        let scale = 1.0 + report.rhs_norm + report.penalty.abs();
        assert!(report.error_term == 0.0 && report.dual_term == 0.0);
        assert!(report.rhs_norm == 0.0);
        assert!(report.mu_phi.abs() <= 1e-10 * scale, "{:e}", report.mu_phi);
        assert!(
            report.mu_star_phi.abs() <= 1e-10 * scale,
            "{:e}",
            report.mu_star_phi
        );
        assert!(
            report.penalty.abs() <= 1e-10 * scale,
            "{:e}",
            report.penalty
        );
        assert!(report.residual <= 1e-10 * scale);
    }

    #[test]
    fn decomposition_residual_and_nonnegativity_for_an_iterate() {
        let (p, sol) = corpus41();
        let mut early = SolveOptions::for_dim(1);
        early.max_iter = 10;
        early.tol = 0.0;
        let v = solve_primal(p, &early).unwrap().u;
        let y = feasible_flux(&v, p).unwrap();
        let report = biharmonic_terms(&v, &y, sol, p).unwrap();
        assert!(report.admissible);
        let scale = 1.0 + report.rhs_norm + report.penalty;
        assert!(
            report.residual <= 1e-10 * scale,
            "residual {:e}",
            report.residual
        );
        assert!(
            report.min_term() >= -1e-12 * scale,
            "min term {:e}",
            report.min_term()
        );
        // agreement with the identity evaluation
        let flux = crate::solver::recover_dual(&sol.u, p).unwrap();
        let dev = deviation_terms(&v, &y, &sol.u, &flux, p).unwrap();
        assert!((dev.e_v - report.error_term).abs() <= 1e-13 * (1.0 + dev.e_v));
        assert!((dev.e_y - report.dual_term).abs() <= 1e-13 * (1.0 + dev.e_y));
        assert!((dev.rhs - report.rhs_norm).abs() <= 1e-13 * (1.0 + dev.rhs));
    }

    /// A flux whose divergence misses the load by one everywhere inside.
    fn inadmissible_flux(p: &ObstacleProblem) -> TensorField {
        let g = p.grid().clone();
        let op = EnergyOperator::new(g.clone(), CoefficientTensor::identity()).unwrap();
        let rhs: Vec<f64> = op
            .interior()
            .iter()
            .map(|&i| g.weight(i) * (p.load().values()[i] - 1.0))
            .collect();
        let w = op.solve_clamped(&rhs).unwrap();
        hessian(&ScalarField::new(g, w).unwrap()).unwrap()
    }

    #[test]
    fn majorant_guards_its_preconditions() {
        let p = contact_problem(17);
        let sol = solved(&p, 1e-12);
        let flux = crate::solver::recover_dual(&sol.u, &p).unwrap();
        let value = majorant(&sol.u, &flux, &p).unwrap();
        assert!(value.abs() <= 1e-10, "exact pair majorant {value:e}");

        // v dipping below the obstacle is refused
        let mut bad = sol.u.clone();
        let mid = p.grid().node_count() / 2;
        bad.values_mut()[mid] = p.obstacle().values()[mid] - 1e-3;
        assert!(matches!(
            majorant(&bad, &flux, &p),
            Err(Error::OutsideConstraintSet { .. })
        ));

        // an inadmissible dual field is refused
        let broken = inadmissible_flux(&p);
        assert!(matches!(
            majorant(&sol.u, &broken, &p),
            Err(Error::InadmissibleDual { .. })
        ));
        // but the flagged diagnostic value is still computable
        assert!(majorant_value(&sol.u, &broken, &p).unwrap().is_finite());
    }

    #[test]
    fn majorant_bounds_the_true_error() {
        let (p, sol) = corpus41();
        let mut early = SolveOptions::for_dim(1);
        early.max_iter = 25;
        early.tol = 0.0;
        let v = solve_primal(p, &early).unwrap().u;
        let y = feasible_flux(&v, p).unwrap();
        let bound = majorant(&v, &y, p).unwrap();
        let flux = crate::solver::recover_dual(&sol.u, p).unwrap();
        let dev = deviation_terms(&v, &y, &sol.u, &flux, p).unwrap();
        let scale = 1.0 + bound.abs();
        assert!(
            dev.e_v <= bound + 1e-10 * scale,
            "error {:e} vs bound {:e}",
            dev.e_v,
            bound
        );
    }

    #[test]
    fn dual_objective_examples_and_strong_duality() {
        let g = Grid::line(0.0, 1.0, 17).unwrap();
        let free = ObstacleProblem::new(
            ScalarField::zeros(g.clone()),
            ScalarField::from_fn(g.clone(), |_, _| -1.0),
            CoefficientTensor::identity(),
        )
        .unwrap();
        let zero = dual_objective(&TensorField::zeros(g), &free).unwrap();
        assert!(zero.feasible);
        assert_eq!(zero.value, 0.0);

        let (p, sol) = corpus41();
        let flux = crate::solver::recover_dual(&sol.u, p).unwrap();
        let dual = dual_objective(&flux, p).unwrap();
        assert!(dual.feasible);
        let primal = p.energy(&sol.u).unwrap();
        assert!(
            (dual.value - primal).abs() <= 1e-8 * (1.0 + primal.abs()),
            "J = {primal}, I* = {}",
            dual.value
        );
    }

    #[test]
    fn duality_gap_equals_the_majorant() {
        let (p, _) = corpus41();
        for k in [5usize, 40] {
            let mut early = SolveOptions::for_dim(1);
            early.max_iter = k;
            early.tol = 0.0;
            let v = solve_primal(p, &early).unwrap().u;
            let y = feasible_flux(&v, p).unwrap();
            let gap = p.energy(&v).unwrap() - dual_objective(&y, p).unwrap().value;
            let bound = majorant(&v, &y, p).unwrap();
            assert!(
                (gap - bound).abs() <= 1e-10 * (1.0 + bound.abs()),
                "k = {k}: gap {gap:e} vs majorant {bound:e}"
            );
        }
    }

    #[test]
    fn comparison_ranks_by_majorant_with_stable_ties() {
        let (p, sol) = corpus41();
        let flux = crate::solver::recover_dual(&sol.u, p).unwrap();
        // direction supported away from the active set, scaled by the gap
        let mut w = ScalarField::zeros(p.grid().clone());
        let active: std::collections::HashSet<usize> = sol.active.iter().cloned().collect();
        for i in 0..p.grid().node_count() {
            let near_active = active.contains(&i)
                || active.contains(&(i + 1))
                || (i > 0 && active.contains(&(i - 1)));
            if !p.grid().is_boundary(i) && !near_active {
                w.values_mut()[i] = sol.u.values()[i] - p.obstacle().values()[i];
            }
        }
        let mut pairs = Vec::new();
        for (name, eps) in [
            ("exact", 0.0),
            ("eps_1e-1", 1e-1),
            ("eps_1e-2", 1e-2),
            ("eps_1e-3", 1e-3),
        ] {
            pairs.push(ApproximationPair {
                name: name.into(),
                primal: sol.u.add_scaled(eps, &w).unwrap(),
                dual: flux.clone(),
            });
        }
        let ranked = compare_approximations(p, sol, &pairs, false).unwrap();
        assert_eq!(ranked[0].rank, 1);
        assert_eq!(ranked[1].rank, 4, "largest perturbation ranks last");
        assert_eq!(ranked[2].rank, 3);
        assert_eq!(ranked[3].rank, 2);

        // identical pairs keep their input order
        let twins = vec![pairs[2].clone(), pairs[2].clone()];
        let ranked = compare_approximations(p, sol, &twins, false).unwrap();
        assert_eq!(ranked[0].rank, 1);
        assert_eq!(ranked[1].rank, 2);
    }

    #[test]
    fn inadmissible_pairs_rank_last_and_are_flagged() {
        let p = contact_problem(17);
        let sol = solved(&p, 1e-12);
        let flux = crate::solver::recover_dual(&sol.u, &p).unwrap();
        let pairs = vec![
            ApproximationPair {
                name: "broken".into(),
                primal: sol.u.clone(),
                dual: inadmissible_flux(&p),
            },
            ApproximationPair {
                name: "good".into(),
                primal: sol.u.clone(),
                dual: flux,
            },
        ];
        let ranked = compare_approximations(&p, &sol, &pairs, false).unwrap();
        assert!(!ranked[0].admissible);
        assert_eq!(ranked[0].rank, 2);
        assert!(ranked[0].majorant.is_none());
        assert!(ranked[1].admissible);
        assert_eq!(ranked[1].rank, 1);

        let forced = compare_approximations(&p, &sol, &pairs, true).unwrap();
        assert!(forced[0].majorant.is_some());
        assert!(!forced[0].admissible);
    }
}
