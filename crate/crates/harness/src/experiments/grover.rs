//! Grover's algorithm as a search inverter, swept over the iteration count.

use perminv::inverter::{grover_spi, InverterKind};
use serde::Deserialize;

use super::{agrees, eval_mode, run_inversion};
use crate::config::ExperimentConfig;
use crate::error::{require, HarnessResult};
use crate::output::ResultRow;

pub const CORE_OPS: &[&str] = &["grover_spi", "run_search_experiment"];

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    /// Largest iteration count; defaults to `floor(pi sqrt(N) / 4)`.
    k_max: Option<u64>,
}

fn params(cfg: &ExperimentConfig) -> HarnessResult<(Params, u64)> {
    let p: Params = cfg.params()?;
    require(cfg.n_bits <= 10, "n_bits", "Grover sweeps are limited to n_bits <= 10")?;
    let k_max = p.k_max.unwrap_or_else(|| default_k_max(cfg.n_bits));
    require(k_max <= 256, "params.k_max", "must be at most 256")?;
    Ok((p, k_max))
}

pub fn default_k_max(n_bits: usize) -> u64 {
    (std::f64::consts::PI * ((1u64 << n_bits) as f64).sqrt() / 4.0).floor() as u64
}

/// `sin^2((2k+1) asin(1/sqrt N))`.
pub fn closed_form(n_bits: usize, k: u64) -> f64 {
    let theta = (1.0 / ((1u64 << n_bits) as f64).sqrt()).asin();
    ((2 * k + 1) as f64 * theta).sin().powi(2)
}

pub fn validate(cfg: &ExperimentConfig) -> HarnessResult<()> {
    params(cfg).map(|_| ())
}

pub fn run(cfg: &ExperimentConfig) -> HarnessResult<Vec<ResultRow>> {
    let (_, k_max) = params(cfg)?;
    let mode = eval_mode(cfg);
    let mut rows = Vec::new();
    for k in 0..=k_max {
        let inv = grover_spi(k);
        let res = run_inversion(&inv, InverterKind::Search, cfg.n_bits, &mode)?;
        let want = closed_form(cfg.n_bits, k);
        rows.push(
            ResultRow::new(cfg, k)
                .label("inverter", res.inverter.clone())
                .value("k", k as f64)
                .prob("success", res.success_probability)
                .value("std_error", res.std_error)
                .value("queries_used", res.queries_used as f64)
                .value("oracle_calls_used", res.oracle_calls_used as f64)
                .bound("closed_form", want, "sin^2((2k+1) asin(1/sqrt(N)))")
                .check("matches_closed_form", agrees(cfg, res.success_probability, res.std_error, want, 1e-9))
                .check("queries_within_declared", res.queries_used <= res.declared.queries),
        );
    }
    Ok(rows)
}
