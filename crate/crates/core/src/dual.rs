//! Dual-field reconstruction: the raw flux of a primal candidate and an
//! admissibility-repaired variant.
//!
//! The repair exploits the exact discrete adjointness: for any clamped `w`,
//! `div_div(hessian(w))` equals `W_V^{-1} H_id w` at interior nodes, so a
//! single clamped solve with the identity coefficient shifts the divergence
//! defect by a prescribed amount. When a repair is needed the requested
//! shift carries a small uniform margin, which keeps the result strictly
//! feasible under floating-point rounding; already-feasible inputs are
//! returned unchanged.

use crate::coeff::CoefficientTensor;
use crate::error::{Error, Result};
use crate::field::{ScalarField, TensorField};
use crate::operators::{div_div, hessian, EnergyOperator};
use crate::solver::ObstacleProblem;

/// The flux a primal candidate induces through the constitutive relation:
/// the coefficient tensor applied to its Hessian.
pub fn naive_flux(v: &ScalarField, problem: &ObstacleProblem) -> Result<TensorField> {
    if v.grid() != problem.grid() {
        return Err(Error::GridMismatch);
    }
    let hv = hessian(v)?;
    problem
        .coefficient()
        .apply(&hv, crate::coeff::ApplyMode::Direct)
}

const REPAIR_ATTEMPTS: usize = 3;

/// Repair the naive flux into the admissible dual set
/// `{ y : f - div_div(y) <= 0 at interior nodes }`.
///
/// Never returns an inadmissible field: if the correction cannot reach
/// feasibility the call errors out instead.
pub fn feasible_flux(v: &ScalarField, problem: &ObstacleProblem) -> Result<TensorField> {
    let grid = problem.grid().clone();
    let y0 = naive_flux(v, problem)?;
    let f = problem.load().values();
    let interior = grid.interior_nodes();

    let defect = |y: &TensorField| -> Vec<f64> {
        let dd = div_div(y);
        interior.iter().map(|&i| f[i] - dd.values()[i]).collect()
    };

    let g0 = defect(&y0);
    if g0.iter().all(|&g| g <= 0.0) {
        return Ok(y0);
    }

    // The identity coefficient on the correction leg makes the divergence
    // shift exact regardless of the problem's tensor.
    let id_op = EnergyOperator::new(grid.clone(), CoefficientTensor::identity())?;
    let margin = 1e-8 * (1.0 + problem.load().max_abs());
    let mut y = y0;
    let mut g = g0;
    for attempt in 1..=REPAIR_ATTEMPTS {
        let rhs: Vec<f64> = interior
            .iter()
            .zip(&g)
            .map(|(&i, &gi)| grid.weight(i) * (gi.max(0.0) + margin))
            .collect();
        let w = id_op.solve_clamped(&rhs)?;
        let w_field = ScalarField::new(grid.clone(), w)?;
        y = y.add_scaled(1.0, &hessian(&w_field)?)?;
        g = defect(&y);
        let worst = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if worst <= 0.0 {
            return Ok(y);
        }
        if attempt == REPAIR_ATTEMPTS {
            return Err(Error::RepairFailed {
                residual: worst,
                attempts: attempt,
            });
        }
    }
    unreachable!("loop returns or errors")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::ApplyMode;
    use crate::deviation::dual_feasible;
    use crate::grid::Grid;
    use crate::solver::{recover_dual, solve_primal, Method, SolveOptions};
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

    #[test]
    fn naive_flux_is_the_operator_composition_bit_for_bit() {
        let g = Grid::rectangle((0.0, 1.0), (0.0, 1.0), (7, 7)).unwrap();
        let mut rng = testing::rng(13);
        let a = testing::random_coefficient(&g, &mut rng);
        let p = ObstacleProblem::new(
            ScalarField::zeros(g.clone()),
            ScalarField::from_fn(g.clone(), |_, _| -1.0),
            a.clone(),
        )
        .unwrap();
        let v = testing::random_clamped(&g, &mut rng, false);
        let direct = naive_flux(&v, &p).unwrap();
        let composed = a.apply(&hessian(&v).unwrap(), ApplyMode::Direct).unwrap();
        assert_eq!(direct.values(), composed.values());
        let zero = naive_flux(&ScalarField::zeros(g), &p).unwrap();
        assert!(zero.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn converged_solution_flux_matches_recover_dual() {
        let p = contact_problem(17);
        let mut opts = SolveOptions::for_dim(1);
        opts.tol = 1e-12;
        opts.method = Method::Psor;
        let sol = solve_primal(&p, &opts).unwrap();
        let a = naive_flux(&sol.u, &p).unwrap();
        let b = recover_dual(&sol.u, &p).unwrap();
        let diff = a.sub(&b).unwrap();
        assert!(diff.norm_sq().sqrt() <= 1e-14);
    }

    #[test]
    fn feasible_inputs_are_returned_unchanged() {
        let p = contact_problem(17);
        let g = p.grid().clone();
        // zero load, zero field: the zero flux has zero defect
        let free = ObstacleProblem::new(
            ScalarField::zeros(g.clone()),
            ScalarField::from_fn(g.clone(), |_, _| -1.0),
            CoefficientTensor::identity(),
        )
        .unwrap();
        let y = feasible_flux(&ScalarField::zeros(g.clone()), &free).unwrap();
        assert!(y.values().iter().all(|&x| x == 0.0));

        // a small field against a strongly negative load: the raw flux is
        // already inside the admissible set and must come back bit-for-bit
        let mut rng = testing::rng(6);
        let mut small = testing::random_clamped(&g, &mut rng, true);
        small.values_mut().iter_mut().for_each(|v| *v *= 1e-9);
        let y0 = naive_flux(&small, &p).unwrap();
        let y = feasible_flux(&small, &p).unwrap();
        assert_eq!(y.values(), y0.values());

        // a converged solution's flux needs at most a marginal repair
        let mut opts = SolveOptions::for_dim(1);
        opts.tol = 1e-12;
        opts.method = Method::Psor;
        let sol = solve_primal(&p, &opts).unwrap();
        let repaired = feasible_flux(&sol.u, &p).unwrap();
        let (ok, _) = dual_feasible(&repaired, &p, p.default_admissibility_tol()).unwrap();
        assert!(ok);
    }

    #[test]
    fn coarse_approximations_get_repaired_into_admissibility() {
        let p = contact_problem(41);
        let mut opts = SolveOptions::for_dim(1);
        opts.tol = 1e-11;
        opts.method = Method::Psor;
        let sol = solve_primal(&p, &opts).unwrap();
        let mut rng = testing::rng(4);
        for smooth in [true, false] {
            let noise = testing::random_clamped(p.grid(), &mut rng, smooth);
            let v = sol.u.add_scaled(1e-3, &noise).unwrap();
            let y0 = naive_flux(&v, &p).unwrap();
            let defect = {
                let dd = div_div(&y0);
                let mut norm2 = 0.0;
                for &i in p.grid().interior_nodes().iter() {
                    let g = (p.load().values()[i] - dd.values()[i]).max(0.0);
                    norm2 += p.grid().weight(i) * g * g;
                }
                norm2.sqrt()
            };
            assert!(defect > 0.0, "perturbation must break admissibility");
            let y = feasible_flux(&v, &p).unwrap();
            let (ok, violation) = dual_feasible(&y, &p, p.default_admissibility_tol()).unwrap();
            assert!(ok, "max violation {:e}", violation.max_abs());
            // correction norm stays proportional to the defect it removed
            let correction = y.sub(&y0).unwrap().norm_sq().sqrt();
            let constant = correction / defect;
            assert!(constant.is_finite() && constant > 0.0);
            println!("repair constant (smooth = {smooth}): |y - y0| <= {constant:.3e} |defect|");
        }
    }

    #[test]
    fn flux_of_solver_iterates_approaches_the_exact_dual() {
        let p = contact_problem(21);
        let mut opts = SolveOptions::for_dim(1);
        opts.tol = 1e-12;
        opts.method = Method::Psor;
        let sol = solve_primal(&p, &opts).unwrap();
        let exact = recover_dual(&sol.u, &p).unwrap();
        let mut distances = Vec::new();
        for k in [3, 30, 300] {
            let mut early = SolveOptions::for_dim(1);
            early.max_iter = k;
            early.tol = 0.0;
            let iterate = solve_primal(&p, &early).unwrap();
            let y = feasible_flux(&iterate.u, &p).unwrap();
            distances.push(y.sub(&exact).unwrap().norm_sq().sqrt());
        }
        assert!(
            distances.last().unwrap() < distances.first().unwrap(),
            "{distances:?}"
        );
    }
}
