use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use idemgeo_verify::{run_suite, Format, Suite, SuiteConfig};

/// Runs numerical verification suites for the idempotent-matrix variety.
///
/// Exit status: 0 if every check passes, 1 if any check fails, 2 for a
/// usage or configuration error.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    /// Matrix size d (2..=16).
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// Rank n (1..=d-1). Rank-1-only suites ignore it.
    #[arg(long, default_value_t = 1)]
    rank: usize,
    /// Random trials per check.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Monte-Carlo samples per Haar integral.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Master seed.
    #[arg(long, env = "IDEMGEO_SEED", default_value_t = 0)]
    seed: u64,
    /// Multiplies every tolerance.
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
    /// Suite to run; repeat for several. Default: all.
    #[arg(long = "suite", value_enum)]
    suites: Vec<Suite>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for the inputs of the worst trial of each failing check.
    #[arg(long, value_name = "DIR")]
    dump_counterexample: Option<PathBuf>,
    /// Record wall-clock times (the report is then no longer reproducible).
    #[arg(long)]
    timings: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = SuiteConfig {
        dim: cli.dim,
        rank: cli.rank,
        trials: cli.trials,
        samples: cli.samples,
        seed: cli.seed,
        tol_scale: cli.tol_scale,
        suites: cli.suites,
        format: cli.format,
        timings: cli.timings,
    };
    let report = match run_suite(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = report.emit(config.format, cli.out.as_deref()) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    if let Some(dir) = &cli.dump_counterexample {
        match report.dump_counterexamples(dir) {
            Ok(paths) => {
                for p in paths {
                    eprintln!("counterexample written to {}", p.display());
                }
            }
            Err(e) => {
                eprintln!("error: cannot write counterexamples: {e}");
                return ExitCode::from(2);
            }
        }
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
