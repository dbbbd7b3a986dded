use clap::{Args, Parser, Subcommand};
use selsys_cli::commands;
use selsys_cli::config::build_settings;
use std::path::PathBuf;
use std::process::ExitCode;

/// Numerical laboratory for singular quasilinear elliptic systems:
/// regime classification, shell-based solvers and property suites.
#[derive(Parser)]
#[command(name = "selsys", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file with dotted keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named scenario from the built-in bank.
    #[arg(long)]
    scenario: Option<String>,
    /// Output directory for run artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for calibration randomness.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the regime, predicted exponents, σ-window and margins.
    Classify(Common),
    /// Run the configured solver and write the artifacts.
    Solve(Common),
    /// Run property suites and report machine-readable pass/fail lines.
    Verify(Common),
}

fn resolve_and_run(common: &Common, f: impl Fn(&selsys_cli::config::ResolvedRun) -> i32) -> u8 {
    let settings = match build_settings(
        common.config.as_deref(),
        common.scenario.as_deref(),
        common.out.as_deref(),
        common.seed,
    ) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match settings.resolve() {
        Ok(run) => f(&run) as u8,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Classify(c) => resolve_and_run(c, commands::run_classify),
        Command::Solve(c) => resolve_and_run(c, commands::run_solve),
        Command::Verify(c) => resolve_and_run(c, commands::run_verify),
    };
    ExitCode::from(code)
}
