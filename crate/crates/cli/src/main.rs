//! `biquat-ed <command> --config <path> [--out <dir>] [--seed N]`
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 configuration
//! error, 3 I/O error.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use commands::{Command, RunError};

const EXIT_CHECK: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "biquat-ed",
    version,
    about = "Biquaternion electrodynamics verification runs"
)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed; overrides `seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let mut config = match config::load_config(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let out_dir = cli.out.unwrap_or_else(|| config.out_dir.clone());

    let start = Instant::now();
    let outcome = match commands::run(cli.command, &config) {
        Ok(o) => o,
        Err(e @ RunError::TableIo { .. }) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_IO);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    eprintln!("{} finished in {:.2?}", cli.command.name(), start.elapsed());

    if let Err(e) = report::write_outputs(&out_dir, &outcome.report, &outcome.maps) {
        eprintln!("error: cannot write to {}: {e}", out_dir.display());
        return ExitCode::from(EXIT_IO);
    }
    for check in &outcome.report.checks {
        let mark = if check.passed { "ok" } else { "FAILED" };
        match (&check.value, &check.error) {
            (_, Some(err)) => println!("{mark:>6}  {}: {err}", check.name),
            (Some(v), None) => println!(
                "{mark:>6}  {}: {v:.3e} < {:.0e}",
                check.name, check.tolerance
            ),
            (None, None) => println!("{mark:>6}  {}", check.name),
        }
    }
    if outcome.report.passed {
        println!(
            "{}: passed, wrote {}",
            cli.command.name(),
            out_dir.display()
        );
        ExitCode::SUCCESS
    } else {
        let names: Vec<&str> = outcome.report.failures().map(|c| c.name.as_str()).collect();
        eprintln!(
            "{}: failed checks: {}",
            cli.command.name(),
            names.join(", ")
        );
        ExitCode::from(EXIT_CHECK)
    }
}
