//! Verification harness for `idemgeo`: runs named suites of numerical checks
//! and produces a deterministic report.

use std::time::Instant;

use rayon::prelude::*;

pub mod config;
pub mod report;
mod suites;

pub use config::{ConfigError, Format, Suite, SuiteConfig, MAX_DIM};
pub use report::{Calibration, Check, Estimate, Report, SuiteReport, Summary, Tool, SCHEMA_VERSION};
pub use suites::compactification::{FAR_T, IMAGE_PAIRS};
pub use suites::d2_model::FIXED_POINTS;
pub use suites::haar::{schur_constant, MAX_PAIRS, SIGMAS};

/// Runs the selected suites in parallel and assembles the report in suite-name order.
pub fn run_suite(config: &SuiteConfig) -> Result<Report, ConfigError> {
    config.validate()?;
    let metric = idemgeo::geometry::metric_calibration();
    let bracket = idemgeo::poisson::bracket_calibration();
    let selected = config.selected();
    let suites: Vec<SuiteReport> = selected
        .par_iter()
        .map(|&suite| {
            let start = Instant::now();
            let ctx = suites::Ctx { cfg: config.clone(), suite };
            let checks = suites::run(suite, &ctx);
            SuiteReport {
                name: suite.name().to_string(),
                checks,
                timing_ms: config.timings.then(|| start.elapsed().as_secs_f64() * 1e3),
            }
        })
        .collect();
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        tool: Tool { name: env!("CARGO_PKG_NAME").to_string(), version: env!("CARGO_PKG_VERSION").to_string() },
        generator: idemgeo::rng::GENERATOR.to_string(),
        config: config.clone(),
        calibration: Calibration {
            metric_constant: metric.constant,
            metric_residual: metric.max_residual,
            bracket_scale: bracket.scale,
            bracket_residual: bracket.residual,
        },
        summary: Summary::of(&suites),
        suites,
    })
}
