//! The verification suites. Each returns its checks in a fixed order; all
//! randomness comes from the suite's own stream of the master seed.

use std::time::{Duration, Instant};

use idemgeo::rng;
use rand_chacha::ChaCha20Rng;
use serde_json::Value;

use crate::config::{Suite, SuiteConfig};
use crate::report::{Check, Estimate};

pub(crate) mod bundle;
pub(crate) mod compactification;
pub(crate) mod d2_model;
pub(crate) mod haar;
pub(crate) mod hyperkahler;
pub(crate) mod identities;
pub(crate) mod poisson;
pub(crate) mod structures;
pub(crate) mod symplectic;

pub(crate) fn run(suite: Suite, ctx: &Ctx) -> Vec<Check> {
    match suite {
        Suite::Identities => identities::run(ctx),
        Suite::ComplexStructures => structures::run(ctx),
        Suite::Symplectic => symplectic::run(ctx),
        Suite::Hyperkahler => hyperkahler::run(ctx),
        Suite::Bundle => bundle::run(ctx),
        Suite::Compactification => compactification::run(ctx),
        Suite::Poisson => poisson::run(ctx),
        Suite::Haar => haar::run(ctx),
        Suite::D2Model => d2_model::run(ctx),
    }
}

pub(crate) struct Ctx {
    pub cfg: SuiteConfig,
    pub suite: Suite,
}

impl Ctx {
    pub fn rng(&self) -> ChaCha20Rng {
        rng::substream(self.cfg.seed, self.suite.stream())
    }

    pub fn check(&self, name: &str, anchor: &str, tolerance: f64) -> Recorder {
        Recorder {
            name: name.to_string(),
            anchor: anchor.to_string(),
            tolerance: tolerance * self.cfg.tol_scale,
            timings: self.cfg.timings,
            trials: 0,
            max: None,
            error: None,
            witness: None,
            estimate: None,
            elapsed: Duration::ZERO,
        }
    }
}

/// Accumulates the worst residual of one check over its trials.
pub(crate) struct Recorder {
    name: String,
    anchor: String,
    tolerance: f64,
    timings: bool,
    trials: usize,
    max: Option<f64>,
    error: Option<String>,
    witness: Option<Value>,
    estimate: Option<Estimate>,
    elapsed: Duration,
}

impl Recorder {
    /// Runs one trial; `witness` is only built when the trial becomes the worst.
    pub fn eval<W, F>(&mut self, witness: W, f: F)
    where
        W: FnOnce() -> Value,
        F: FnOnce() -> idemgeo::Result<f64>,
    {
        let start = self.timings.then(Instant::now);
        let r = f();
        if let Some(s) = start {
            self.elapsed += s.elapsed();
        }
        self.trials += 1;
        match r {
            Ok(v) if v.is_finite() => {
                if self.error.is_none() && self.max.is_none_or(|m| v > m) {
                    self.max = Some(v);
                    self.witness = Some(witness());
                }
            }
            Ok(v) => self.fail(format!("non-finite residual {v}"), witness),
            Err(e) => self.fail(e.to_string(), witness),
        }
    }

    fn fail<W: FnOnce() -> Value>(&mut self, message: String, witness: W) {
        if self.error.is_none() {
            self.error = Some(message);
            self.witness = Some(witness());
        }
    }

    pub fn set_estimate(&mut self, value: f64, stderr: f64, reference: Option<f64>) {
        self.estimate = Some(Estimate { value, stderr, reference });
    }

    pub fn finish(self) -> Check {
        let max_residual = if self.error.is_some() { None } else { self.max };
        let error = match (&self.error, self.trials) {
            (None, 0) => Some("no trials ran".to_string()),
            _ => self.error,
        };
        Check {
            pass: error.is_none() && max_residual.is_some_and(|r| r <= self.tolerance),
            name: self.name,
            anchor: self.anchor,
            trials: self.trials,
            max_residual,
            tolerance: self.tolerance,
            estimate: self.estimate,
            error,
            timing_ms: self.timings.then(|| self.elapsed.as_secs_f64() * 1e3),
            counterexample: self.witness,
        }
    }
}

/// JSON object of named matrices.
pub(crate) fn witness(items: &[(&str, &idemgeo::ComplexMatrix)]) -> Value {
    Value::Object(
        items
            .iter()
            .map(|(k, m)| (k.to_string(), serde_json::to_value(m).expect("matrix serializes")))
            .collect(),
    )
}

/// Ratio `σ_max / σ_min` of a nonempty list of singular values; infinite when singular.
pub(crate) fn condition(singular: &[f64]) -> f64 {
    let max = singular.iter().copied().fold(0.0, f64::max);
    let min = singular.iter().copied().fold(f64::INFINITY, f64::min);
    if singular.is_empty() || min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Largest condition number accepted as "nondegenerate".
pub(crate) const MAX_CONDITION: f64 = 1e8;
