use std::path::Path;

use clap::ValueEnum;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Pass thresholds of the verification suites. The numerical tolerances
/// inside the library are fixed; these decide what a suite accepts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Covering-map homomorphism, Minkowski form and sign invariance.
    pub group: f64,
    /// Wigner rotations and canonical boosts.
    pub wigner: f64,
    /// Line-surface residual relative to `max(1, |s|)`.
    pub residual: f64,
    /// Crossing parameter against closed forms.
    pub closed_form: f64,
    /// Radon-Nikodym derivative against a finite-difference Jacobian.
    pub rn_derivative: f64,
    /// Quadrature line measure against the closed form, relative.
    pub measure: f64,
    /// Standard errors allowed between two Monte Carlo estimates.
    pub sigmas: f64,
    /// Energy covariance, mass invariance and chart round trips.
    pub spectrum: f64,
    /// Spin-factor and density identities.
    pub appendix: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            group: 1e-9,
            wigner: 1e-10,
            residual: 1e-11,
            closed_form: 1e-10,
            rn_derivative: 1e-6,
            measure: 1e-4,
            sigmas: 3.0,
            spectrum: 1e-9,
            appendix: 1e-6,
        }
    }
}

impl Thresholds {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let t: Thresholds = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("tolerance file {}: {e}", path.display())))?;
        let values = serde_json::to_value(t).expect("plain struct");
        let bad = values.as_object().into_iter().flatten().find(|(_, v)| !(v.as_f64().is_some_and(|x| x >= 0.0)));
        if let Some((name, v)) = bad {
            return Err(CliError::Config(format!("tolerance '{name}' must be a nonnegative number, got {v}")));
        }
        Ok(t)
    }
}

/// Everything a run depends on. Seed and worker count fix every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    /// Overrides the per-property sample count of every randomized check.
    pub samples: Option<usize>,
    pub workers: Option<usize>,
    pub format: Format,
    pub thresholds: Thresholds,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { seed: 1, samples: None, workers: None, format: Format::Json, thresholds: Thresholds::default() }
    }
}

impl RunConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    /// The sample count of a check whose default is `default`.
    pub fn n(&self, default: usize) -> usize {
        self.samples.unwrap_or(default).max(1)
    }

    /// An independent stream per named check, so adding a check never
    /// shifts the draws of another.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    /// A derived seed for library checkers that take one.
    pub fn seed_for(&self, stream: u64) -> u64 {
        self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(stream)
    }
}
