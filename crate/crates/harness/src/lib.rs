//! Seeded experiment runner for the `perminv` toolkit.
//!
//! A run is described by a JSON [`ExperimentConfig`]; the named experiment
//! turns it into [`ResultRow`]s, written one JSON object per line. Trials
//! run on a rayon pool (size from `PERMINV_THREADS`) and are merged in trial
//! order, so output bytes do not depend on the thread count.

pub mod config;
pub mod error;
pub mod experiments;
pub mod inverters;
pub mod output;
pub mod parallel;
pub mod registry;
pub mod selftest;

pub use config::{ExperimentConfig, Mode};
pub use error::{HarnessError, HarnessResult};
pub use output::{emit_plot_data, write_jsonl, ResultRow};
pub use registry::{find, registry, run_experiment, Entry};

/// Version string recorded in every row.
pub fn version() -> String {
    format!("v{}", env!("CARGO_PKG_VERSION"))
}
