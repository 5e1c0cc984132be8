//! The experiment commands behind the CLI.
//!
//! Every command loads the config, solves the problem, and writes
//! `report.json` and `report.csv` into the output directory. Commands
//! differ in which approximation pairs they evaluate and which invariant
//! checks they record; any failed check is reported through
//! [`RunSummary::violations`] and becomes exit code 2.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use devlab_core::{
    brute_force_qp, compare_approximations, dual_objective, solve_primal, DenseQp, RankedPair,
};

use crate::config::{load_problem, LoadedProblem, ProblemConfig};
use crate::recipes::build_pairs;
use crate::report::{FieldsEcho, GridEcho, InvariantCheck, PairRow, Report, SolverEcho};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    VerifyIdentity,
    Majorant,
    Compare,
    OracleCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::VerifyIdentity => "verify-identity",
            Command::Majorant => "majorant",
            Command::Compare => "compare",
            Command::OracleCheck => "oracle-check",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunArgs {
    pub config: PathBuf,
    pub out: PathBuf,
    pub force: bool,
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub struct RunSummary {
    pub violations: usize,
    pub json_path: PathBuf,
    pub csv_path: PathBuf,
}

struct Experiment {
    config: ProblemConfig,
    loaded: LoadedProblem,
    solution: devlab_core::PrimalSolution,
    seed: u64,
}

fn prepare(args: &RunArgs) -> Result<Experiment> {
    let mut config = ProblemConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let seed = config.seed;
    let loaded = load_problem(&config)?;
    let opts = config.solver_options()?;
    let solution = solve_primal(&loaded.problem, &opts)?;
    Ok(Experiment {
        config,
        loaded,
        solution,
        seed,
    })
}

/// Built pairs and their evaluations; both vectors share the declaration
/// order (the rank field records the ordering instead of permuting rows).
fn evaluate_pairs(
    exp: &Experiment,
    force: bool,
) -> Result<(Vec<devlab_core::ApproximationPair>, Vec<RankedPair>)> {
    let pairs = build_pairs(&exp.config, &exp.loaded, &exp.solution, exp.seed)?;
    let ranked = compare_approximations(&exp.loaded.problem, &exp.solution, &pairs, force)?;
    Ok((pairs, ranked))
}

fn base_report(exp: &Experiment, command: Command, pairs: Vec<PairRow>) -> Report {
    Report {
        command: command.name().to_string(),
        seed: exp.seed,
        config_echo: exp.config.clone(),
        grid: GridEcho::new(exp.loaded.problem.grid()),
        solver: SolverEcho::new(
            &exp.config.solver.method,
            exp.config.solver.tol,
            &exp.solution,
        ),
        pairs,
        invariant_checks: Vec::new(),
        fields: None,
    }
}

/// Run one command end to end; prints a short summary to stdout.
pub fn run(command: Command, args: &RunArgs) -> Result<RunSummary> {
    let exp = prepare(args)?;
    let mut report = match command {
        Command::Solve => {
            let mut report = base_report(&exp, command, Vec::new());
            report.fields = Some(FieldsEcho {
                u: exp.solution.u.values().to_vec(),
                multiplier: exp.solution.multiplier.values().to_vec(),
                active: exp.solution.active.clone(),
            });
            report.invariant_checks.push(InvariantCheck::boolean(
                "solver_converged",
                exp.solution.converged,
            ));
            report.invariant_checks.push(InvariantCheck::upper(
                "kkt_max",
                exp.solution.kkt.max(),
                exp.config.solver.tol,
            ));
            report
        }
        Command::VerifyIdentity => {
            let (_, ranked) = evaluate_pairs(&exp, args.force)?;
            let mut report = base_report(&exp, command, ranked.iter().map(PairRow::new).collect());
            for pair in &ranked {
                report.invariant_checks.push(InvariantCheck::upper(
                    format!("identity_residual/{}", pair.name),
                    pair.deviation.residual,
                    1e-12 * (1.0 + pair.deviation.rhs),
                ));
                report.invariant_checks.push(InvariantCheck::upper(
                    format!("rhs_norm_equivalence/{}", pair.name),
                    (pair.deviation.rhs_alt - pair.deviation.rhs).abs(),
                    1e-12 * (1.0 + pair.deviation.rhs),
                ));
            }
            report
        }
        Command::Majorant => {
            let (built, ranked) = evaluate_pairs(&exp, args.force)?;
            let mut report = base_report(&exp, command, ranked.iter().map(PairRow::new).collect());
            for (fields, pair) in built.iter().zip(&ranked) {
                let scale =
                    1.0 + pair.decomposition.rhs_norm.abs() + pair.decomposition.penalty.abs();
                if let (true, Some(bound)) = (pair.admissible, pair.majorant) {
                    report.invariant_checks.push(InvariantCheck::upper(
                        format!("majorant_bounds_error/{}", pair.name),
                        pair.true_error - bound,
                        1e-10 * scale,
                    ));
                    let gap = exp.loaded.problem.energy(&fields.primal)?
                        - dual_objective(&fields.dual, &exp.loaded.problem)?.value;
                    report.invariant_checks.push(InvariantCheck::upper(
                        format!("duality_gap_matches/{}", pair.name),
                        (gap - bound).abs(),
                        1e-10 * (1.0 + bound.abs()),
                    ));
                }
            }
            report
        }
        Command::Compare => {
            let (_, ranked) = evaluate_pairs(&exp, args.force)?;
            base_report(&exp, command, ranked.iter().map(PairRow::new).collect())
        }
        Command::OracleCheck => {
            let qp = DenseQp::from_problem(&exp.loaded.problem)
                .context("oracle-check needs at most 16 interior unknowns")?;
            let oracle = brute_force_qp(&qp)?;
            let u_oracle = qp.expand(&oracle.u);
            let diff = exp.solution.u.sub(&u_oracle)?.max_abs();
            let oracle_active: Vec<usize> = oracle.active.iter().map(|&k| qp.nodes()[k]).collect();
            let solver_active: Vec<usize> = exp
                .solution
                .active
                .iter()
                .cloned()
                .filter(|&i| !exp.loaded.problem.grid().is_boundary(i))
                .collect();
            let mut multiplier = devlab_core::ScalarField::zeros(exp.loaded.problem.grid().clone());
            for (k, &node) in qp.nodes().iter().enumerate() {
                multiplier.values_mut()[node] =
                    oracle.multiplier[k] / exp.loaded.problem.grid().weight(node);
            }
            let oracle_kkt = devlab_core::kkt_report(
                &u_oracle,
                &multiplier,
                &exp.loaded.problem,
                exp.solution.epsilon_active,
            )?;
            let mut report = base_report(&exp, command, Vec::new());
            report.invariant_checks.push(InvariantCheck::upper(
                "solver_matches_oracle_max_norm",
                diff,
                1e-8,
            ));
            report.invariant_checks.push(InvariantCheck::boolean(
                "active_sets_agree",
                solver_active == oracle_active,
            ));
            report.invariant_checks.push(InvariantCheck::upper(
                "oracle_kkt_residual",
                oracle_kkt.max(),
                1e-10,
            ));
            report
        }
    };
    report.invariant_checks.insert(
        0,
        InvariantCheck::boolean("solver_converged", exp.solution.converged),
    );
    let (json_path, csv_path) = report.write(&args.out)?;
    print_summary(&report);
    Ok(RunSummary {
        violations: report.violations(),
        json_path,
        csv_path,
    })
}

fn print_summary(report: &Report) {
    println!(
        "{}: {} pair(s), {} invariant check(s), {} violation(s)",
        report.command,
        report.pairs.len(),
        report.invariant_checks.len(),
        report.violations()
    );
    for check in &report.invariant_checks {
        println!(
            "  [{}] {} (value {:.3e}, tol {:.3e})",
            if check.pass { "pass" } else { "FAIL" },
            check.name,
            check.value,
            check.tol
        );
    }
}

/// Resolve the thread cap before any parallel work: the DEVLAB_THREADS
/// environment variable, when set, bounds the rayon pool.
pub fn init_parallelism() -> Result<()> {
    if let Ok(raw) = std::env::var("DEVLAB_THREADS") {
        let threads: usize = raw
            .parse()
            .with_context(|| format!("DEVLAB_THREADS must be a positive integer, got '{raw}'"))?;
        if threads == 0 {
            bail!("DEVLAB_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("rayon pool already initialized")?;
    }
    Ok(())
}

/// Byte-identical rerun check used by the determinism tests.
pub fn read_csv(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}
