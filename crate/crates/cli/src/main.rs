use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use devlab_cli::commands::{self, Command, RunArgs};

/// Obstacle-problem experiments with guaranteed a posteriori error bounds.
#[derive(Parser)]
#[command(name = "devlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the problem and report the solution, multiplier and KKT residuals.
    Solve(RunOpts),
    /// Evaluate the deviation identity for every approximation pair.
    #[command(name = "verify-identity")]
    VerifyIdentity(RunOpts),
    /// Evaluate guaranteed majorants and the duality-gap equality.
    Majorant(RunOpts),
    /// Rank approximation pairs by their majorant.
    Compare(RunOpts),
    /// Check the solver against the brute-force enumeration oracle.
    #[command(name = "oracle-check")]
    OracleCheck(RunOpts),
}

#[derive(Args)]
struct RunOpts {
    /// Problem definition file (TOML, or JSON with a .json extension).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for report.json and report.csv.
    #[arg(long, default_value = "devlab-out")]
    out: PathBuf,
    /// Compute flagged majorant values even for inadmissible pairs.
    #[arg(long)]
    force: bool,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn to_args(opts: RunOpts) -> RunArgs {
    RunArgs {
        config: opts.config,
        out: opts.out,
        force: opts.force,
        seed: opts.seed,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help/version requests are successes; everything else is a usage error
            use clap::error::ErrorKind;
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Err(err) = commands::init_parallelism() {
        eprintln!("error: {err:#}");
        return ExitCode::from(1);
    }
    let (command, opts) = match cli.command {
        Cmd::Solve(o) => (Command::Solve, o),
        Cmd::VerifyIdentity(o) => (Command::VerifyIdentity, o),
        Cmd::Majorant(o) => (Command::Majorant, o),
        Cmd::Compare(o) => (Command::Compare, o),
        Cmd::OracleCheck(o) => (Command::OracleCheck, o),
    };
    match commands::run(command, &to_args(opts)) {
        Ok(summary) if summary.violations == 0 => ExitCode::SUCCESS,
        Ok(summary) => {
            eprintln!(
                "{} invariant violation(s); reports in {}",
                summary.violations,
                summary.json_path.display()
            );
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
