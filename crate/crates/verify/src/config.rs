use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_DIM: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Identities,
    ComplexStructures,
    Symplectic,
    Hyperkahler,
    Bundle,
    Compactification,
    Poisson,
    Haar,
    #[value(name = "d2-model")]
    #[serde(rename = "d2-model")]
    D2Model,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Identities,
        Suite::ComplexStructures,
        Suite::Symplectic,
        Suite::Hyperkahler,
        Suite::Bundle,
        Suite::Compactification,
        Suite::Poisson,
        Suite::Haar,
        Suite::D2Model,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::ComplexStructures => "complex-structures",
            Suite::Symplectic => "symplectic",
            Suite::Hyperkahler => "hyperkahler",
            Suite::Bundle => "bundle",
            Suite::Compactification => "compactification",
            Suite::Poisson => "poisson",
            Suite::Haar => "haar",
            Suite::D2Model => "d2-model",
        }
    }

    /// Random stream of the master seed owned by this suite.
    pub(crate) fn stream(&self) -> u64 {
        *self as u64 + 1
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub dim: usize,
    pub rank: usize,
    pub trials: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol_scale: f64,
    /// Empty means every suite.
    pub suites: Vec<Suite>,
    pub format: Format,
    pub timings: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            dim: 3,
            rank: 1,
            trials: 100,
            samples: 100_000,
            seed: 0,
            tol_scale: 1.0,
            suites: Vec::new(),
            format: Format::Text,
            timings: false,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("invalid {field}: {message}")]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError { field, message: message.into() }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.dim < 2 || self.dim > MAX_DIM {
            return Err(invalid("dim", format!("{} is outside 2..={MAX_DIM}", self.dim)));
        }
        if self.rank < 1 || self.rank >= self.dim {
            return Err(invalid("rank", format!("need 1 <= rank <= dim - 1 = {}, got {}", self.dim - 1, self.rank)));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be positive"));
        }
        if self.samples == 0 {
            return Err(invalid("samples", "must be positive"));
        }
        if !(self.tol_scale.is_finite() && self.tol_scale > 0.0) {
            return Err(invalid("tol-scale", format!("must be a positive finite number, got {}", self.tol_scale)));
        }
        Ok(())
    }

    /// Selected suites, deduplicated and ordered by name.
    pub fn selected(&self) -> Vec<Suite> {
        let mut s = if self.suites.is_empty() { Suite::ALL.to_vec() } else { self.suites.clone() };
        s.sort_by_key(|x| x.name());
        s.dedup();
        s
    }
}
