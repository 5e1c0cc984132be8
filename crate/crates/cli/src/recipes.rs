//! Constructing approximation pairs from recipe declarations.
//!
//! Primal recipes produce clamped fields in the constraint set (every
//! perturbation is projected back above the obstacle); dual recipes
//! produce tensor fields from a primal candidate. The experiment evaluates
//! the cartesian product, named `"<approximation>/<dual>"`.

use anyhow::{bail, Context, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use devlab_core::{
    feasible_flux, naive_flux, operators::lowest_clamped_modes, recover_dual, solve_primal,
    ApproximationPair, Grid, ObstacleProblem, PrimalSolution, ScalarField, SolveOptions,
    TensorField,
};

use crate::config::LoadedProblem;
use crate::config::{ApproxKind, DualKind, PerturbMode, ProblemConfig};

/// Interpolate a coarse nodal field onto a finer grid of the same box.
/// Weights are formed from index ratios, so shared nodes (in particular
/// the whole boundary) are reproduced exactly.
pub fn prolong(coarse: &ScalarField, fine: &Grid) -> Result<ScalarField> {
    let cg = coarse.grid();
    if cg.dim() != fine.dim() {
        bail!("coarse and fine grids have different dimensions");
    }
    let axis_weights = |axis: usize, i_fine: usize| -> (usize, usize, f64) {
        let n_f = fine.axes()[axis].nodes;
        let n_c = cg.axes()[axis].nodes;
        let num = i_fine * (n_c - 1);
        let den = n_f - 1;
        let cell = (num / den).min(n_c - 2);
        let t = (num - cell * den) as f64 / den as f64;
        (cell, cell + 1, t)
    };
    let mut out = ScalarField::zeros(fine.clone());
    for node in 0..fine.node_count() {
        let (ix, iy) = fine.node_split(node);
        let (x0, x1, tx) = axis_weights(0, ix);
        let value = if fine.dim() == 1 {
            (1.0 - tx) * coarse.values()[x0] + tx * coarse.values()[x1]
        } else {
            let (y0, y1, ty) = axis_weights(1, iy);
            let v00 = coarse.values()[cg.node_index(x0, y0)];
            let v10 = coarse.values()[cg.node_index(x1, y0)];
            let v01 = coarse.values()[cg.node_index(x0, y1)];
            let v11 = coarse.values()[cg.node_index(x1, y1)];
            (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11)
        };
        out.values_mut()[node] = value;
    }
    Ok(out)
}

/// Clip a clamped field back into the constraint set.
fn project_onto_obstacle(mut v: ScalarField, problem: &ObstacleProblem) -> ScalarField {
    let grid = problem.grid();
    for i in 0..grid.node_count() {
        if !grid.is_boundary(i) {
            let phi = problem.obstacle().values()[i];
            if v.values()[i] < phi {
                v.values_mut()[i] = phi;
            }
        }
    }
    v
}

fn perturbation_direction(
    mode: PerturbMode,
    problem: &ObstacleProblem,
    rng: &mut ChaCha8Rng,
) -> Result<ScalarField> {
    let grid = problem.grid().clone();
    let mut z = ScalarField::zeros(grid.clone());
    match mode {
        PerturbMode::Rough => {
            for i in 0..grid.node_count() {
                if !grid.is_boundary(i) {
                    z.values_mut()[i] = rng.random_range(-1.0..1.0);
                }
            }
        }
        PerturbMode::Smooth => {
            let op = problem.operator();
            let modes = lowest_clamped_modes(&op, 5)
                .context("smooth perturbations need a dense eigensolve of the grid")?;
            for mode_field in &modes {
                let c: f64 = rng.random_range(-1.0..1.0);
                z = z.add_scaled(c, mode_field)?;
            }
        }
    }
    let max = z.max_abs();
    if max > 0.0 {
        z.values_mut().iter_mut().for_each(|v| *v /= max);
    }
    Ok(z)
}

fn build_approximation(
    kind: &ApproxKind,
    loaded: &LoadedProblem,
    solution: &PrimalSolution,
    opts: &SolveOptions,
    rng: &mut ChaCha8Rng,
) -> Result<ScalarField> {
    let problem = &loaded.problem;
    match kind {
        ApproxKind::Exact => Ok(solution.u.clone()),
        ApproxKind::Perturb { epsilon, mode } => {
            if epsilon.is_nan() || *epsilon < 0.0 {
                bail!("perturb epsilon must be nonnegative");
            }
            let z = perturbation_direction(*mode, problem, rng)?;
            let scale = epsilon * (1.0 + solution.u.max_abs());
            let v = solution.u.add_scaled(scale, &z)?;
            Ok(project_onto_obstacle(v, problem))
        }
        ApproxKind::Coarse { nodes } => {
            if nodes.len() != problem.grid().dim() {
                bail!("coarse recipe needs one node count per axis");
            }
            let bounds: Vec<(f64, f64)> = problem
                .grid()
                .axes()
                .iter()
                .map(|a| (a.min, a.max))
                .collect();
            let coarse_grid = Grid::new(&bounds, nodes)?;
            let coarse_problem = loaded.resample(&coarse_grid)?;
            let mut coarse_opts = opts.clone();
            coarse_opts.max_iter = coarse_opts.max_iter.max(200_000);
            let coarse_solution = solve_primal(&coarse_problem, &coarse_opts)?;
            let v = prolong(&coarse_solution.u, problem.grid())?;
            Ok(project_onto_obstacle(v, problem))
        }
        ApproxKind::Iterate { k } => {
            if *k == 0 {
                bail!("iterate recipe needs k >= 1");
            }
            let mut early = opts.clone();
            early.max_iter = *k;
            early.tol = 0.0;
            Ok(solve_primal(problem, &early)?.u)
        }
    }
}

fn build_dual(
    kind: &DualKind,
    v: &ScalarField,
    problem: &ObstacleProblem,
    solution: &PrimalSolution,
) -> Result<TensorField> {
    Ok(match kind {
        DualKind::Naive => naive_flux(v, problem)?,
        DualKind::Feasible => feasible_flux(v, problem)?,
        DualKind::Exact => recover_dual(&solution.u, problem)?,
    })
}

/// Build the cartesian product of approximation and dual recipes. Each
/// perturbation recipe draws from its own stream derived from the master
/// seed and the recipe position, so adding a recipe does not reshuffle the
/// others.
pub fn build_pairs(
    config: &ProblemConfig,
    loaded: &LoadedProblem,
    solution: &PrimalSolution,
    seed: u64,
) -> Result<Vec<ApproximationPair>> {
    if config.approximations.is_empty() || config.duals.is_empty() {
        bail!("need at least one approximation recipe and one dual recipe");
    }
    let opts = config.solver_options()?;
    let mut pairs = Vec::new();
    for (idx, recipe) in config.approximations.iter().enumerate() {
        let mut rng =
            devlab_core::testing::rng(seed ^ (0x9e3779b97f4a7c15u64.wrapping_mul(idx as u64 + 1)));
        let v = build_approximation(&recipe.kind, loaded, solution, &opts, &mut rng)
            .with_context(|| format!("approximation recipe '{}'", recipe.name))?;
        for dual in &config.duals {
            let y = build_dual(&dual.kind, &v, &loaded.problem, solution)
                .with_context(|| format!("dual recipe '{}' for '{}'", dual.name, recipe.name))?;
            pairs.push(ApproximationPair {
                name: format!("{}/{}", recipe.name, dual.name),
                primal: v.clone(),
                dual: y,
            });
        }
    }
    Ok(pairs)
}
