//! Command-line entry point: `simulate`, `report` and `oracle`.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 I/O error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::analysis::config::{parse_config, spec_to_json};
use crate::analysis::csv::{read_series_csv_file, write_series_csv_file};
use crate::analysis::trend::trend_report;
use crate::analysis::coupon_oracle;
use crate::econ::derive_stream;
use crate::error::SimError;
use crate::harness::{run_experiment_with, RunOptions};
use crate::serverfi::expected_collection_cost;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gamefi-sim", version, about = "Tokenomics agent-based simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment and write the aggregate series as CSV
    Simulate {
        /// JSON experiment config
        #[arg(long)]
        config: PathBuf,
        /// Override master_seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override iterations
        #[arg(long)]
        iterations: Option<u32>,
        /// Override repeats
        #[arg(long)]
        repeats: Option<u32>,
        /// Destination for the series CSV
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the trend report as JSON
        #[arg(long)]
        report: Option<PathBuf>,
        /// Worker threads for repeats (output does not depend on this)
        #[arg(long)]
        workers: Option<usize>,
        /// Write one raw CSV per repeat into this directory
        #[arg(long)]
        raw_dir: Option<PathBuf>,
        /// Write the effective spec (config plus overrides) as JSON
        #[arg(long)]
        spec_out: Option<PathBuf>,
    },
    /// Recompute the trend report from a series CSV
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Compare the closed-form collection cost with a Monte Carlo estimate
    Oracle {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
}

enum Failure {
    Invalid(String),
    Io(String),
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

/// Parse `argv` (including the program name) and run.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`cli_main`] with explicit output streams.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_INVALID
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INVALID
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_IO
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Simulate {
            config,
            seed,
            iterations,
            repeats,
            out: csv_path,
            report,
            workers,
            raw_dir,
            spec_out,
        } => {
            let text = fs::read_to_string(&config).map_err(|e| io_failure(&config, e))?;
            let mut spec = parse_config(&text)?;
            if let Some(seed) = seed {
                spec.master_seed = seed;
            }
            if let Some(n) = iterations {
                spec.iterations = n;
            }
            if let Some(n) = repeats {
                spec.repeats = n;
            }
            spec.validate()?;
            if workers == Some(0) {
                return Err(Failure::Invalid("--workers must be at least 1".into()));
            }
            let csv_path =
                csv_path.ok_or_else(|| Failure::Invalid("simulate requires --out <csv path>".into()))?;
            if let Some(path) = &spec_out {
                fs::write(path, spec_to_json(&spec) + "\n").map_err(|e| io_failure(path, e))?;
            }

            let options = RunOptions {
                workers,
                raw_cap: Some(0),
                spill_dir: raw_dir,
            };
            let output = run_experiment_with(&spec, &options)?;
            write_series_csv_file(&output.series, &csv_path)
                .map_err(|e| io_failure(&csv_path, e))?;
            if let Some(path) = report {
                let trend = trend_report(&output.series)?;
                let json = serde_json::to_string_pretty(&trend).expect("report serializes");
                fs::write(&path, json + "\n").map_err(|e| io_failure(&path, e))?;
            }
            let _ = writeln!(
                out,
                "wrote {} iterations x {} repeats to {}",
                spec.iterations,
                spec.repeats,
                csv_path.display()
            );
            Ok(())
        }
        Command::Report { input } => {
            let series = read_series_csv_file(&input).map_err(|e| match e {
                SimError::Io(io) => io_failure(&input, io),
                other => other.into(),
            })?;
            let trend = trend_report(&series)?;
            let json = serde_json::to_string_pretty(&trend).expect("report serializes");
            let _ = writeln!(out, "{json}");
            Ok(())
        }
        Command::Oracle {
            k,
            trials,
            seed,
            lambda,
        } => {
            if k == 0 {
                return Err(Failure::Invalid("--k must be at least 1".into()));
            }
            if trials == 0 {
                return Err(Failure::Invalid("--trials must be at least 1".into()));
            }
            if !(lambda.is_finite() && lambda > 0.0) {
                return Err(Failure::Invalid("--lambda must be positive".into()));
            }
            let analytic = expected_collection_cost(k, lambda);
            let mut rng = derive_stream(seed, 0);
            let estimate = lambda * coupon_oracle(k, trials, &mut rng);
            let rel_error = (estimate - analytic).abs() / analytic;
            let _ = writeln!(out, "k: {k}");
            let _ = writeln!(out, "lambda: {lambda}");
            let _ = writeln!(out, "trials: {trials}");
            let _ = writeln!(out, "analytic: {analytic:.4}");
            let _ = writeln!(out, "monte_carlo: {estimate:.4}");
            let _ = writeln!(out, "rel_error: {rel_error:.6}");
            Ok(())
        }
    }
}
