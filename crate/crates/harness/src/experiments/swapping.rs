//! Distance between final states of random query circuits under two oracles
//! that differ on a set `S`, against `sqrt(T q)`.

use perminv::bounds::{random_swapping_instance, swapping_check, SwappingReport};
use perminv::rng::{derive_seed, Coins};
use serde::Deserialize;

use crate::config::ExperimentConfig;
use crate::error::{require, HarnessResult};
use crate::output::ResultRow;
use crate::parallel::map_ordered;

pub const CORE_OPS: &[&str] = &["random_swapping_instance", "swapping_check"];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct Params {
    count: u64,
    min_bits: usize,
    max_bits: usize,
    min_queries: u64,
    max_queries: u64,
    /// Treat a violation of `sqrt(T q)` as a failed check (the factor-two
    /// hybrid bound is always checked).
    assert_paper_form: bool,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            count: 100,
            min_bits: 2,
            max_bits: 4,
            min_queries: 3,
            max_queries: 8,
            assert_paper_form: true,
        }
    }
}

fn params(cfg: &ExperimentConfig) -> HarnessResult<Params> {
    let p: Params = cfg.params()?;
    require((1..=100_000).contains(&p.count), "params.count", "must lie in 1..=100000")?;
    require(
        1 <= p.min_bits && p.min_bits <= p.max_bits && p.max_bits <= 6,
        "params.min_bits/max_bits",
        "need 1 <= min_bits <= max_bits <= 6",
    )?;
    require(
        1 <= p.min_queries && p.min_queries <= p.max_queries && p.max_queries <= 64,
        "params.min_queries/max_queries",
        "need 1 <= min_queries <= max_queries <= 64",
    )?;
    Ok(p)
}

pub fn validate(cfg: &ExperimentConfig) -> HarnessResult<()> {
    params(cfg).map(|_| ())
}

/// Instance `i`: `(input bits, queries, seed)`.
fn instance_shape(p: &Params, seed: u64, i: u64) -> (usize, u64, u64) {
    let s = derive_seed(seed, i);
    let mut coins = Coins::from_seed(derive_seed(s, 0));
    let bits = p.min_bits + coins.below((p.max_bits - p.min_bits + 1) as u64) as usize;
    let t = p.min_queries + coins.below(p.max_queries - p.min_queries + 1);
    (bits, t, derive_seed(s, 1))
}

/// Linear-interpolated quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn run(cfg: &ExperimentConfig) -> HarnessResult<Vec<ResultRow>> {
    let p = params(cfg)?;
    let shapes: Vec<(usize, u64, u64)> = (0..p.count).map(|i| instance_shape(&p, cfg.seed, i)).collect();
    let reports: Vec<SwappingReport> = map_ordered(&shapes, |&(bits, t, seed)| {
        let (circuit, f, g) = random_swapping_instance(bits, t, seed)?;
        swapping_check(&circuit, &f, &g, t)
    })?;
    let mut rows = Vec::with_capacity(reports.len() + 1);
    for (i, (r, &(bits, _, _))) in reports.iter().zip(&shapes).enumerate() {
        let mut row = ResultRow::new(cfg, i as u64)
            .label("kind", "instance")
            .value("input_bits", bits as f64)
            .value("queries", r.queries as f64)
            .value("distance", r.distance)
            .value("magnitude", r.magnitude)
            .value("tightness", r.tightness().min(1e300))
            .value("holds", r.holds as u8 as f64)
            .bound("sqrt_tq", r.bound, "sqrt(T q(A^f, S))")
            .bound("hybrid", r.hybrid_bound, "2 sqrt(T q(A^f, S))")
            .check("holds_hybrid", r.holds_hybrid);
        if p.assert_paper_form {
            row = row.check("holds_sqrt_tq", r.holds);
        }
        rows.push(row);
    }
    let mut ratios: Vec<f64> = reports.iter().filter(|r| r.bound > 0.0).map(|r| r.tightness()).collect();
    ratios.sort_by(f64::total_cmp);
    let violations = reports.iter().filter(|r| !r.holds).count();
    let mut summary = ResultRow::new(cfg, rows.len() as u64)
        .label("kind", "summary")
        .value("instances", reports.len() as f64)
        .value("violations_sqrt_tq", violations as f64)
        .value("violations_hybrid", reports.iter().filter(|r| !r.holds_hybrid).count() as f64)
        .value("zero_bound_instances", (reports.len() - ratios.len()) as f64);
    if !ratios.is_empty() {
        summary = summary
            .value("tightness_min", ratios[0])
            .value("tightness_median", quantile(&ratios, 0.5))
            .value("tightness_p90", quantile(&ratios, 0.9))
            .value("tightness_max", ratios[ratios.len() - 1]);
    }
    if p.assert_paper_form {
        summary = summary.check("all_hold_sqrt_tq", violations == 0);
    }
    rows.push(summary);
    Ok(rows)
}
