//! A fixed suite of small runs covering every registered experiment.

use serde_json::json;

use crate::config::{ExperimentConfig, Mode};
use crate::error::{HarnessError, HarnessResult};
use crate::output::ResultRow;
use crate::registry::run_experiment;

fn cfg(experiment: &str, seed: u64, n_bits: usize, trials: u64, mode: Mode, params: serde_json::Value) -> ExperimentConfig {
    ExperimentConfig {
        experiment: experiment.into(),
        seed,
        n_bits,
        trials,
        mode,
        params,
    }
}

pub fn selftest_configs(seed: u64) -> Vec<ExperimentConfig> {
    use Mode::{Exact, Sampled};
    vec![
        cfg("grover_sweep", seed, 4, 1, Exact, json!({})),
        cfg("search_amplification", seed, 3, 2, Exact, json!({"epsilon": [0.25], "ell": [1, 3]})),
        cfg("decision_amplification", seed, 3, 2, Exact, json!({"delta": [0.1], "ell": [9, 10]})),
        cfg("search_to_decision", seed, 3, 50, Sampled, json!({})),
        cfg("unique_search", seed, 4, 200, Sampled, json!({})),
        cfg("swapping_lemma", seed, 2, 1, Exact, json!({"count": 20})),
        cfg("tail_bounds", seed, 1, 1, Exact, json!({"n": [25, 52], "tables": 200})),
        cfg("qrac_round_trip", seed, 3, 5, Exact, json!({"decode_queries": 20})),
        cfg(
            "qrac_round_trip",
            seed,
            3,
            3,
            Exact,
            json!({"inverter": {"kind": "grover", "iterations": 1}, "gamma": 0.9, "decode_queries": 20}),
        ),
        cfg("ow_qccra2_rp", seed, 4, 500, Sampled, json!({"adversary": "random_guess"})),
        cfg("ow_qccra2_rp", seed, 4, 500, Sampled, json!({"adversary": "ciphertext_probing"})),
        cfg("ow_qccra2_rp", seed, 4, 50, Sampled, json!({"adversary": "full_key"})),
    ]
}

/// Runs the suite on the current pool; rows come back in suite order.
pub fn run_selftest(seed: u64) -> HarnessResult<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for c in selftest_configs(seed) {
        rows.extend(run_experiment(&c)?);
    }
    Ok(rows)
}

/// `(experiment, row, check)` for every failed check.
pub fn failures(rows: &[ResultRow]) -> Vec<(String, u64, String)> {
    rows.iter()
        .flat_map(|r| {
            r.failed_checks()
                .into_iter()
                .map(|c| (r.experiment.clone(), r.row, c.to_string()))
        })
        .collect()
}

/// Fails with a runtime error listing the failed checks, if any.
pub fn ensure_passed(rows: &[ResultRow]) -> HarnessResult<()> {
    let f = failures(rows);
    if f.is_empty() {
        return Ok(());
    }
    let list: Vec<String> = f.iter().map(|(e, r, c)| format!("{e}#{r}: {c}")).collect();
    Err(HarnessError::Runtime(format!("failed checks: {}", list.join("; "))))
}
