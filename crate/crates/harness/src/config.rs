use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{require, HarnessError, HarnessResult};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Sampled,
}

/// One experiment run. `seed` is mandatory; experiment-specific settings
/// live in `params` and are checked by the experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: u64,
    pub n_bits: usize,
    #[serde(default = "one")]
    pub trials: u64,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub params: serde_json::Value,
}

fn one() -> u64 {
    1
}

pub const MAX_TRIALS: u64 = 10_000_000;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> HarnessResult<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.check_common()?;
        Ok(cfg)
    }

    /// Reads and fully validates a config file, including the experiment's
    /// own parameters.
    pub fn load(path: &Path) -> HarnessResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        let cfg = Self::from_json(&text)?;
        crate::registry::validate(&cfg)?;
        Ok(cfg)
    }

    fn check_common(&self) -> HarnessResult<()> {
        require((1..=16).contains(&self.n_bits), "n_bits", "must lie in 1..=16")?;
        require(
            (1..=MAX_TRIALS).contains(&self.trials),
            "trials",
            format!("must lie in 1..={MAX_TRIALS}"),
        )?;
        require(
            self.params.is_null() || self.params.is_object(),
            "params",
            "must be an object",
        )
    }

    /// Deserializes `params` into the experiment's parameter type; a missing
    /// `params` means all defaults.
    pub fn params<P: DeserializeOwned + Default>(&self) -> HarnessResult<P> {
        if self.params.is_null() {
            return Ok(P::default());
        }
        serde_json::from_value(self.params.clone()).map_err(|e| HarnessError::Config(format!("params: {e}")))
    }

    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
