//! Problem definition files.
//!
//! Configs are flat key/value text (TOML) or the same structure as JSON;
//! `.json` files are parsed as JSON, everything else as TOML. Fields `f`,
//! `phi` and scalar coefficients are formulas in the [`crate::expr`]
//! grammar, sampled at the grid nodes on load.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use devlab_core::{CoefficientTensor, Grid, Method, ObstacleProblem, ScalarField, SolveOptions};

use crate::expr::Expr;

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub problem: ProblemSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub approximations: Vec<ApproxRecipe>,
    #[serde(default)]
    pub duals: Vec<DualRecipe>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub dim: usize,
    /// One `[min, max]` pair per axis.
    pub bounds: Vec<[f64; 2]>,
    /// Nodes per axis.
    pub nodes: Vec<usize>,
    /// Load formula.
    pub f: String,
    /// Obstacle formula; must be nonpositive on the boundary.
    pub phi: String,
    #[serde(default)]
    pub coefficient: CoeffSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(untagged)]
pub enum CoeffSpec {
    #[default]
    Identity,
    /// The literal string "identity".
    Named(String),
    /// Positive scalar formula times the identity.
    Scalar { scalar: String },
    /// Constant matrix on the tensor components (1x1 in 1D, 3x3 in 2D).
    Matrix { matrix: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Defaults to 200000 in 1D and 500000 in 2D.
    #[serde(default)]
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub epsilon_active: Option<f64>,
}

fn default_method() -> String {
    "projected_gradient".into()
}

fn default_tol() -> f64 {
    1e-9
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            method: default_method(),
            tol: default_tol(),
            max_iter: None,
            epsilon_active: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproxRecipe {
    pub name: String,
    #[serde(flatten)]
    pub kind: ApproxKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ApproxKind {
    /// The solver's own solution.
    Exact,
    /// Seeded random perturbation of the solution, projected back onto the
    /// constraint set.
    Perturb {
        epsilon: f64,
        #[serde(default)]
        mode: PerturbMode,
    },
    /// Solve on a coarser grid and interpolate up.
    Coarse { nodes: Vec<usize> },
    /// Stop the solver after `k` iterations.
    Iterate { k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PerturbMode {
    /// Independent noise at every interior node.
    #[default]
    Rough,
    /// Random combination of the five lowest clamped eigenmodes.
    Smooth,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualRecipe {
    pub name: String,
    #[serde(flatten)]
    pub kind: DualKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DualKind {
    /// Coefficient tensor applied to the Hessian of the approximation.
    Naive,
    /// Naive flux repaired into the admissible set.
    Feasible,
    /// Flux of the solver's solution.
    Exact,
}

impl ProblemConfig {
    pub fn from_str_auto(text: &str, json: bool) -> Result<Self> {
        if json {
            serde_json::from_str(text).context("config is not valid JSON")
        } else {
            toml::from_str(text).context("config is not valid TOML")
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let json = path.extension().is_some_and(|e| e == "json");
        Self::from_str_auto(&text, json)
            .with_context(|| format!("failed to parse {}", path.display()))
    }

    pub fn solver_options(&self) -> Result<SolveOptions> {
        let dim = self.problem.dim;
        let mut opts = SolveOptions::for_dim(dim);
        opts.method = match self.solver.method.as_str() {
            "projected_gradient" => Method::ProjectedGradient,
            "psor" => Method::Psor,
            other => bail!("unknown solver method '{other}' (projected_gradient | psor)"),
        };
        if self.solver.tol.is_nan() || self.solver.tol <= 0.0 {
            bail!("solver tol must be positive, got {}", self.solver.tol);
        }
        opts.tol = self.solver.tol;
        if let Some(m) = self.solver.max_iter {
            opts.max_iter = m;
        }
        opts.epsilon_active = self.solver.epsilon_active;
        Ok(opts)
    }
}

/// An expression sampled over a grid; evaluation errors abort with the
/// node location.
pub fn sample(expr: &Expr, grid: &Grid, what: &str) -> Result<ScalarField> {
    let mut values = Vec::with_capacity(grid.node_count());
    for node in 0..grid.node_count() {
        let [x, y] = grid.node_coord(node);
        let v = expr
            .eval(x, y)
            .map_err(|e| anyhow!("{what} at node ({x}, {y}): {e}"))?;
        if !v.is_finite() {
            bail!("{what} is not finite at node ({x}, {y})");
        }
        values.push(v);
    }
    Ok(ScalarField::new(grid.clone(), values)?)
}

fn parse_formula(src: &str, what: &str, dim: usize) -> Result<Expr> {
    let expr = Expr::parse(src).map_err(|e| anyhow!("{what}: {e}"))?;
    if dim == 1 && expr.uses_y() {
        bail!("{what} uses 'y' but the problem is one-dimensional");
    }
    Ok(expr)
}

/// Materialized problem data together with the parsed formulas (the
/// recipes re-sample them on coarser grids).
#[derive(Debug)]
pub struct LoadedProblem {
    pub problem: ObstacleProblem,
    pub f_expr: Expr,
    pub phi_expr: Expr,
    pub coeff_spec: CoeffSpec,
}

impl LoadedProblem {
    /// The same continuous problem sampled on another grid.
    pub fn resample(&self, grid: &Grid) -> Result<ObstacleProblem> {
        let f = sample(&self.f_expr, grid, "f")?;
        let phi = sample(&self.phi_expr, grid, "phi")?;
        let coeff = build_coefficient(&self.coeff_spec, grid)?;
        Ok(ObstacleProblem::new(f, phi, coeff)?)
    }
}

pub fn build_coefficient(spec: &CoeffSpec, grid: &Grid) -> Result<CoefficientTensor> {
    match spec {
        CoeffSpec::Identity => Ok(CoefficientTensor::identity()),
        CoeffSpec::Named(name) if name == "identity" => Ok(CoefficientTensor::identity()),
        CoeffSpec::Named(other) => bail!(
            "unknown coefficient '{other}'; use \"identity\", {{ scalar = ... }} or {{ matrix = ... }}"
        ),
        CoeffSpec::Scalar { scalar } => {
            let expr = parse_formula(scalar, "coefficient scalar", grid.dim())?;
            let field = sample(&expr, grid, "coefficient scalar")?;
            Ok(CoefficientTensor::scalar(field)?)
        }
        CoeffSpec::Matrix { matrix } => Ok(CoefficientTensor::constant_matrix(matrix)?),
    }
}

/// Build the discrete problem from a config: parse formulas, sample them,
/// and run the structural validations (SPD coefficient, obstacle sign on
/// the boundary).
pub fn load_problem(config: &ProblemConfig) -> Result<LoadedProblem> {
    let p = &config.problem;
    if p.dim != 1 && p.dim != 2 {
        bail!("dim must be 1 or 2, got {}", p.dim);
    }
    if p.bounds.len() != p.dim || p.nodes.len() != p.dim {
        bail!(
            "expected {} bounds and node counts, got {} and {}",
            p.dim,
            p.bounds.len(),
            p.nodes.len()
        );
    }
    let bounds: Vec<(f64, f64)> = p.bounds.iter().map(|b| (b[0], b[1])).collect();
    let grid = Grid::new(&bounds, &p.nodes)?;
    let f_expr = parse_formula(&p.f, "f", p.dim)?;
    let phi_expr = parse_formula(&p.phi, "phi", p.dim)?;
    let f = sample(&f_expr, &grid, "f")?;
    let phi = sample(&phi_expr, &grid, "phi")?;
    let coeff = build_coefficient(&p.coefficient, &grid)?;
    let problem = ObstacleProblem::new(f, phi, coeff)?;
    Ok(LoadedProblem {
        problem,
        f_expr,
        phi_expr,
        coeff_spec: p.coefficient.clone(),
    })
}
