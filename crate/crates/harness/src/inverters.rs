use std::sync::Arc;

use perminv::inverter::{
    grover_spi, ConstantInverter, FullTableInverter, Inverter, InverterKind, LookupInverter,
    RandomnessSource, ScanDecisionInverter, SyntheticDecisionInverter, SyntheticSearchInverter,
};
use serde::{Deserialize, Serialize};

use crate::error::{require, HarnessResult};

/// Inverters selectable from a config, e.g. `{"kind": "grover", "iterations": 2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InverterChoice {
    Grover {
        iterations: u64,
    },
    FullTable {
        #[serde(default = "search")]
        problem: InverterKind,
    },
    Lookup {
        fraction: f64,
    },
    Constant {
        #[serde(default = "search")]
        problem: InverterKind,
        #[serde(default)]
        value: u64,
    },
    SyntheticSearch {
        epsilon: f64,
        #[serde(default = "one")]
        queries: u64,
    },
    SyntheticDecision {
        delta: f64,
        #[serde(default = "measurement")]
        source: RandomnessSource,
        #[serde(default = "one")]
        queries: u64,
    },
    ScanDecision {
        adaptive_bits: usize,
    },
}

fn search() -> InverterKind {
    InverterKind::Search
}

fn one() -> u64 {
    1
}

fn measurement() -> RandomnessSource {
    RandomnessSource::Measurement
}

impl InverterChoice {
    /// Builds the inverter for `n_bits`; `field` names the config entry in
    /// error messages.
    pub fn build(&self, n_bits: usize, field: &str) -> HarnessResult<Arc<dyn Inverter>> {
        let cfg_err = |e: perminv::Error| crate::HarnessError::Config(format!("{field}: {e}"));
        Ok(match self {
            InverterChoice::Grover { iterations } => {
                require(*iterations <= 1 << 12, field, "too many Grover iterations")?;
                Arc::new(grover_spi(*iterations))
            }
            InverterChoice::FullTable { problem } => Arc::new(FullTableInverter { kind: *problem }),
            InverterChoice::Lookup { fraction } => {
                Arc::new(LookupInverter::new(n_bits, *fraction).map_err(cfg_err)?)
            }
            InverterChoice::Constant { problem, value } => {
                let limit = match problem {
                    InverterKind::Search => 1u64 << n_bits,
                    InverterKind::Decision => 2,
                };
                require(*value < limit, field, format!("value must be below {limit}"))?;
                Arc::new(ConstantInverter {
                    kind: *problem,
                    value: *value,
                })
            }
            InverterChoice::SyntheticSearch { epsilon, queries } => {
                Arc::new(SyntheticSearchInverter::new(*epsilon, *queries).map_err(cfg_err)?)
            }
            InverterChoice::SyntheticDecision {
                delta,
                source,
                queries,
            } => Arc::new(SyntheticDecisionInverter::new(*delta, *source, *queries).map_err(cfg_err)?),
            InverterChoice::ScanDecision { adaptive_bits } => {
                require(*adaptive_bits < n_bits, field, "adaptive_bits must be below n_bits")?;
                Arc::new(ScanDecisionInverter {
                    adaptive_bits: *adaptive_bits,
                })
            }
        })
    }
}
