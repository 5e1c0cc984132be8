//! Report emission: one JSON document plus one CSV table per run.
//!
//! The CSV is byte-deterministic: floats are printed with 17 significant
//! digits, '.' as the decimal separator and '\n' line endings, and rows
//! follow the recipe declaration order.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use devlab_core::{Grid, KktReport, PrimalSolution, RankedPair};

use crate::config::ProblemConfig;

pub const CSV_HEADER: &str =
    "name,E_v,E_y,M_K,RHS,residual,mu_phi,mu_star_phi,penalty,majorant,true_error,admissible,rank";

/// 17 significant digits, locale-independent.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub config_echo: ProblemConfig,
    pub grid: GridEcho,
    pub solver: SolverEcho,
    pub pairs: Vec<PairRow>,
    pub invariant_checks: Vec<InvariantCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fields: Option<FieldsEcho>,
}

#[derive(Debug, Serialize)]
pub struct GridEcho {
    pub dim: usize,
    pub bounds: Vec<[f64; 2]>,
    pub nodes: Vec<usize>,
    pub spacing: Vec<f64>,
    pub node_count: usize,
}

impl GridEcho {
    pub fn new(grid: &Grid) -> Self {
        GridEcho {
            dim: grid.dim(),
            bounds: grid.axes().iter().map(|a| [a.min, a.max]).collect(),
            nodes: grid.axes().iter().map(|a| a.nodes).collect(),
            spacing: grid.axes().iter().map(|a| a.spacing).collect(),
            node_count: grid.node_count(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SolverEcho {
    pub method: String,
    pub tol: f64,
    pub iterations: usize,
    pub converged: bool,
    pub kkt: KktEcho,
    pub active_nodes: usize,
    pub epsilon_active: f64,
}

#[derive(Debug, Serialize)]
pub struct KktEcho {
    pub stationarity: f64,
    pub feasibility: f64,
    pub complementarity: f64,
    pub multiplier_sign: f64,
}

impl KktEcho {
    pub fn new(kkt: &KktReport) -> Self {
        KktEcho {
            stationarity: kkt.stationarity,
            feasibility: kkt.feasibility,
            complementarity: kkt.complementarity,
            multiplier_sign: kkt.multiplier_sign,
        }
    }
}

impl SolverEcho {
    pub fn new(method: &str, tol: f64, solution: &PrimalSolution) -> Self {
        SolverEcho {
            method: method.to_string(),
            tol,
            iterations: solution.iterations,
            converged: solution.converged,
            kkt: KktEcho::new(&solution.kkt),
            active_nodes: solution.active.len(),
            epsilon_active: solution.epsilon_active,
        }
    }
}

/// One approximation pair, flattened for both JSON and CSV.
#[derive(Debug, Serialize)]
pub struct PairRow {
    pub name: String,
    pub e_v: f64,
    pub e_y: f64,
    pub m_k: f64,
    pub rhs: f64,
    pub rhs_alt: f64,
    pub identity_residual: f64,
    pub mu_phi: f64,
    pub mu_star_phi: f64,
    pub dual_term: f64,
    pub rhs_norm: f64,
    pub penalty: f64,
    pub decomposition_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub majorant: Option<f64>,
    pub true_error: f64,
    pub admissible: bool,
    pub rank: usize,
}

impl PairRow {
    pub fn new(pair: &RankedPair) -> Self {
        PairRow {
            name: pair.name.clone(),
            e_v: pair.deviation.e_v,
            e_y: pair.deviation.e_y,
            m_k: pair.deviation.m_k,
            rhs: pair.deviation.rhs,
            rhs_alt: pair.deviation.rhs_alt,
            identity_residual: pair.deviation.residual,
            mu_phi: pair.decomposition.mu_phi,
            mu_star_phi: pair.decomposition.mu_star_phi,
            dual_term: pair.decomposition.dual_term,
            rhs_norm: pair.decomposition.rhs_norm,
            penalty: pair.decomposition.penalty,
            decomposition_residual: pair.decomposition.residual,
            majorant: pair.majorant,
            true_error: pair.true_error,
            admissible: pair.admissible,
            rank: pair.rank,
        }
    }

    fn csv_line(&self) -> String {
        let majorant = match self.majorant {
            Some(v) => format_float(v),
            None => "nan".to_string(),
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.name,
            format_float(self.e_v),
            format_float(self.e_y),
            format_float(self.m_k),
            format_float(self.rhs),
            format_float(self.identity_residual),
            format_float(self.mu_phi),
            format_float(self.mu_star_phi),
            format_float(self.penalty),
            majorant,
            format_float(self.true_error),
            self.admissible,
            self.rank
        )
    }
}

/// One named check with its measured value and tolerance; any failed check
/// turns the process exit code into 2.
#[derive(Debug, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub tol: f64,
}

impl InvariantCheck {
    pub fn upper(name: impl Into<String>, value: f64, tol: f64) -> Self {
        InvariantCheck {
            name: name.into(),
            pass: value <= tol,
            value,
            tol,
        }
    }

    pub fn boolean(name: impl Into<String>, pass: bool) -> Self {
        InvariantCheck {
            name: name.into(),
            pass,
            value: if pass { 1.0 } else { 0.0 },
            tol: 1.0,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FieldsEcho {
    /// Solution values in node order.
    pub u: Vec<f64>,
    /// Obstacle multiplier in node order.
    pub multiplier: Vec<f64>,
    /// Active node indices, ascending.
    pub active: Vec<usize>,
}

impl Report {
    pub fn csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.pairs {
            out.push_str(&row.csv_line());
            out.push('\n');
        }
        out
    }

    pub fn write(&self, out_dir: &Path) -> Result<(std::path::PathBuf, std::path::PathBuf)> {
        std::fs::create_dir_all(out_dir)
            .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
        let json_path = out_dir.join("report.json");
        let csv_path = out_dir.join("report.csv");
        let mut json = serde_json::to_string_pretty(self).context("serializing report")?;
        json.push('\n');
        std::fs::write(&json_path, json)
            .with_context(|| format!("writing {}", json_path.display()))?;
        std::fs::write(&csv_path, self.csv())
            .with_context(|| format!("writing {}", csv_path.display()))?;
        Ok((json_path, csv_path))
    }

    pub fn violations(&self) -> usize {
        self.invariant_checks.iter().filter(|c| !c.pass).count()
    }
}
