//! End-to-end checks of the `devlab` binary: exit codes, report files,
//! and byte-determinism of the CSV output.

use std::path::{Path, PathBuf};
use std::process::Command;

fn devlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_devlab"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn verify_identity_succeeds_on_the_beam_config() {
    let dir = tempfile::tempdir().unwrap();
    let status = devlab()
        .args(["verify-identity", "--config"])
        .arg(configs().join("beam_contact.toml"))
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["command"], "verify-identity");
    assert_eq!(report["grid"]["node_count"], 41);
    let checks = report["invariant_checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["pass"].as_bool().unwrap()));
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(csv.starts_with(
        "name,E_v,E_y,M_K,RHS,residual,mu_phi,mu_star_phi,penalty,majorant,true_error,admissible,rank"
    ));
    assert_eq!(csv.lines().count(), 1 + 8, "4 approximations x 2 duals");
}

#[test]
fn repeated_runs_emit_byte_identical_csv() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let status = devlab()
            .args(["verify-identity", "--seed", "7", "--config"])
            .arg(configs().join("beam_contact.toml"))
            .arg("--out")
            .arg(dir.path())
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let csv_a = std::fs::read(a.path().join("report.csv")).unwrap();
    let csv_b = std::fs::read(b.path().join("report.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
    assert!(!csv_a.is_empty());
}

#[test]
fn solve_reports_fields_and_kkt() {
    let dir = tempfile::tempdir().unwrap();
    let status = devlab()
        .args(["solve", "--config"])
        .arg(configs().join("beam_oracle.toml"))
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["fields"]["u"].as_array().unwrap().len(), 14);
    assert_eq!(report["fields"]["multiplier"].as_array().unwrap().len(), 14);
    assert!(report["solver"]["converged"].as_bool().unwrap());
    assert!(!report["fields"]["active"].as_array().unwrap().is_empty());
}

#[test]
fn oracle_check_agrees_on_the_small_instance() {
    let dir = tempfile::tempdir().unwrap();
    let output = devlab()
        .args(["oracle-check", "--config"])
        .arg(configs().join("beam_oracle.toml"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(
        output.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&output.stdout)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    let checks = report["invariant_checks"].as_array().unwrap();
    let find = |name: &str| {
        checks
            .iter()
            .find(|c| c["name"] == name)
            .unwrap_or_else(|| panic!("missing check {name}"))
    };
    assert_eq!(find("solver_matches_oracle_max_norm")["pass"], true);
    assert_eq!(find("active_sets_agree")["pass"], true);
    assert_eq!(find("oracle_kkt_residual")["pass"], true);
}

#[test]
fn compare_ranks_the_exact_pair_first() {
    let dir = tempfile::tempdir().unwrap();
    let status = devlab()
        .args(["compare", "--config"])
        .arg(configs().join("beam_contact.toml"))
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let rank_one = csv
        .lines()
        .find(|l| l.ends_with(",true,1"))
        .expect("a rank-1 admissible row");
    assert!(
        rank_one.starts_with("exact/"),
        "a pair built from the solved field ranks first: {rank_one}"
    );
    // the perturbed pairs rank behind every exact-primal pair
    for line in csv.lines().filter(|l| l.starts_with("smooth_1e-2/")) {
        let rank: usize = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(rank > 2, "{line}");
    }
}

#[test]
fn majorant_checks_pass_on_the_variable_coefficient_beam() {
    let dir = tempfile::tempdir().unwrap();
    let output = devlab()
        .args(["majorant", "--config"])
        .arg(configs().join("beam_variable_coeff.toml"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(
        output.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&output.stdout)
    );
}

#[test]
fn usage_errors_exit_with_one() {
    // unknown subcommand
    let status = devlab().arg("frobnicate").status().unwrap();
    assert_eq!(status.code(), Some(1));
    // missing config file
    let status = devlab()
        .args(["solve", "--config", "/nonexistent/nope.toml"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn invalid_configs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    // obstacle positive on the boundary
    let bad = dir.path().join("bad.toml");
    std::fs::write(
        &bad,
        "[problem]\ndim = 1\nbounds = [[0.0, 1.0]]\nnodes = [9]\nf = \"0\"\nphi = \"0.1\"\n",
    )
    .unwrap();
    let out = devlab()
        .args(["solve", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("boundary"));

    // formula with a syntax error, reported with its offset
    let bad = dir.path().join("expr.toml");
    std::fs::write(
        &bad,
        "[problem]\ndim = 1\nbounds = [[0.0, 1.0]]\nnodes = [9]\nf = \"2 + * 3\"\nphi = \"-1\"\n",
    )
    .unwrap();
    let out = devlab()
        .args(["solve", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte 4"));
}

#[test]
fn invariant_violations_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // starve the solver so the convergence check fails
    let starved = dir.path().join("starved.toml");
    std::fs::write(
        &starved,
        "[problem]\ndim = 1\nbounds = [[0.0, 1.0]]\nnodes = [41]\nf = \"-5\"\nphi = \"-0.001\"\n\
         [solver]\ntol = 1e-12\nmax_iter = 3\n",
    )
    .unwrap();
    let out = devlab()
        .args(["solve", "--config"])
        .arg(&starved)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("[FAIL] solver_converged"));
}

#[test]
fn report_json_round_trips_through_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let status = devlab()
        .args(["solve", "--config"])
        .arg(configs().join("beam_oracle.toml"))
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    // the echoed config re-validates against the config schema
    let echo: devlab_cli::config::ProblemConfig =
        serde_json::from_value(report["config_echo"].clone()).unwrap();
    assert_eq!(echo.problem.nodes, vec![14]);
    assert_eq!(echo.seed, report["seed"].as_u64().unwrap());
    assert_eq!(report["grid"]["dim"], 1);
    assert!(report["solver"]["kkt"]["stationarity"]
        .as_f64()
        .unwrap()
        .is_finite());
}

#[test]
fn oracle_check_refuses_oversized_grids() {
    let dir = tempfile::tempdir().unwrap();
    let out = devlab()
        .args(["oracle-check", "--config"])
        .arg(configs().join("beam_contact.toml"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("16"));
}
