use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{Format, SuiteConfig};

/// Bumped on any incompatible change to the JSON layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: Tool,
    pub generator: String,
    pub config: SuiteConfig,
    pub calibration: Calibration,
    pub suites: Vec<SuiteReport>,
    pub summary: Summary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

/// Constants fitted once at startup from fixed seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// `c` in `g = c · g_unscaled`.
    pub metric_constant: f64,
    pub metric_residual: f64,
    /// Signed factor applied to the raw bracket of the canonical symplectic form.
    pub bracket_scale: f64,
    pub bracket_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub trials: usize,
    /// `None` when an evaluation failed or produced a non-finite value.
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<Estimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
    /// Inputs of the worst trial; written by `--dump-counterexample`, not part of the report.
    #[serde(skip)]
    pub counterexample: Option<serde_json::Value>,
}

/// A Monte-Carlo estimate attached to a check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
}

impl Summary {
    pub fn of(suites: &[SuiteReport]) -> Self {
        let checks = suites.iter().map(|s| s.checks.len()).sum();
        let passed = suites.iter().flat_map(|s| &s.checks).filter(|c| c.pass).count();
        Self { checks, passed, failed: checks - passed }
    }
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn checks(&self) -> impl Iterator<Item = (&str, &Check)> {
        self.suites.iter().flat_map(|s| s.checks.iter().map(move |c| (s.name.as_str(), c)))
    }

    pub fn find(&self, suite: &str, check: &str) -> Option<&Check> {
        self.checks().find(|(s, c)| *s == suite && c.name == check).map(|(_, c)| c)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let rows: Vec<[String; 6]> = self
            .checks()
            .map(|(suite, c)| {
                [
                    suite.to_string(),
                    c.name.clone(),
                    c.anchor.clone(),
                    c.max_residual.map_or_else(|| "n/a".to_string(), |r| format!("{r:.3e}")),
                    format!("{:.1e}", c.tolerance),
                    if c.pass { "PASS".into() } else { "FAIL".into() },
                ]
            })
            .collect();
        let header = ["suite", "check", "anchor", "max residual", "tolerance", "result"];
        let mut width = header.map(|h| h.chars().count());
        for r in &rows {
            for (w, cell) in width.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut out = String::new();
            for (i, (cell, w)) in cells.iter().zip(width).enumerate() {
                if i > 0 {
                    out.push_str("  ");
                }
                out.push_str(cell);
                if i + 1 < cells.len() {
                    out.extend(std::iter::repeat_n(' ', w - cell.chars().count()));
                }
            }
            out.push('\n');
            out
        };
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} {}  d={} n={} trials={} samples={} seed={} generator={}",
            self.tool.name,
            self.tool.version,
            self.config.dim,
            self.config.rank,
            self.config.trials,
            self.config.samples,
            self.config.seed,
            self.generator
        );
        let _ = writeln!(
            out,
            "metric constant {:.15}  bracket scale {:.15}",
            self.calibration.metric_constant, self.calibration.bracket_scale
        );
        out.push_str(&line(&header.map(String::from)));
        out.push_str(&line(&width.map(|w| "-".repeat(w))));
        for r in &rows {
            out.push_str(&line(r));
        }
        for (suite, c) in self.checks() {
            if let Some(e) = &c.error {
                let _ = writeln!(out, "error in {suite}/{}: {e}", c.name);
            }
            if let Some(e) = &c.estimate {
                let _ = write!(out, "estimate {suite}/{}: {:.6} ± {:.2e}", c.name, e.value, e.stderr);
                if let Some(r) = e.reference {
                    let _ = write!(out, " (reference {r:.6})");
                }
                out.push('\n');
            }
            if let Some(t) = c.timing_ms {
                let _ = writeln!(out, "time {suite}/{}: {t:.1} ms", c.name);
            }
        }
        let _ = writeln!(
            out,
            "{} checks, {} passed, {} failed",
            self.summary.checks, self.summary.passed, self.summary.failed
        );
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Json => self.to_json(),
        }
    }

    /// Writes the report to `path`, or to stdout when `path` is `None`.
    pub fn emit(&self, format: Format, path: Option<&Path>) -> io::Result<()> {
        let s = self.render(format);
        match path {
            Some(p) => std::fs::write(p, s),
            None => io::stdout().lock().write_all(s.as_bytes()),
        }
    }

    /// One JSON file per failing check with the inputs of its worst trial.
    pub fn dump_counterexamples(&self, dir: &Path) -> io::Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (suite, c) in self.checks().filter(|(_, c)| !c.pass) {
            let Some(cx) = &c.counterexample else { continue };
            let slug: String = c
                .name
                .chars()
                .map(|ch| if ch.is_ascii_alphanumeric() { ch.to_ascii_lowercase() } else { '-' })
                .collect();
            let path = dir.join(format!("{suite}__{slug}.json"));
            let body = serde_json::json!({
                "suite": suite,
                "check": c.name,
                "anchor": c.anchor,
                "max_residual": c.max_residual,
                "inputs": cx,
            });
            std::fs::write(&path, serde_json::to_string_pretty(&body).expect("json value") + "\n")?;
            written.push(path);
        }
        Ok(written)
    }
}
