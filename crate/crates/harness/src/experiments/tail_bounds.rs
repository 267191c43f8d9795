//! Tail bounds checked against exact binomial sums and enumerated
//! distributions.

use perminv::bounds::{averaging_subset, chernoff_lower_tail, chernoff_majority, reverse_markov};
use perminv::rng::{derive_seed, Coins};
use serde::Deserialize;
use statrs::distribution::{Binomial, Discrete, DiscreteCDF};

use crate::config::ExperimentConfig;
use crate::error::{require, HarnessError, HarnessResult};
use crate::output::ResultRow;

pub const CORE_OPS: &[&str] = &[
    "chernoff_lower_tail",
    "chernoff_majority",
    "reverse_markov",
    "averaging_subset",
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct Params {
    n: Vec<u64>,
    p: Vec<f64>,
    delta: Vec<f64>,
    /// Random distributions / tables for the reverse Markov and averaging
    /// checks.
    tables: u64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            n: vec![25, 52, 100, 200],
            p: vec![0.6, 2.0 / 3.0, 0.75],
            delta: vec![0.1, 0.3, 0.5],
            tables: 1000,
        }
    }
}

fn params(cfg: &ExperimentConfig) -> HarnessResult<Params> {
    let p: Params = cfg.params()?;
    for (i, n) in p.n.iter().enumerate() {
        require((1..=100_000).contains(n), &format!("params.n[{i}]"), "must lie in 1..=100000")?;
    }
    for (i, x) in p.p.iter().enumerate() {
        require(*x > 0.0 && *x < 1.0, &format!("params.p[{i}]"), "must lie in (0, 1)")?;
    }
    for (i, d) in p.delta.iter().enumerate() {
        require(*d > 0.0 && *d < 1.0, &format!("params.delta[{i}]"), "must lie in (0, 1)")?;
    }
    require(p.tables <= 1_000_000, "params.tables", "must be at most 10^6")?;
    Ok(p)
}

pub fn validate(cfg: &ExperimentConfig) -> HarnessResult<()> {
    params(cfg).map(|_| ())
}

fn binomial(n: u64, p: f64) -> HarnessResult<Binomial> {
    Binomial::new(p, n).map_err(|e| HarnessError::Runtime(e.to_string()))
}

/// `Pr[Bin(n, p) < t]`.
fn lower_tail_strict(n: u64, p: f64, t: f64) -> HarnessResult<f64> {
    let b = binomial(n, p)?;
    Ok((0..=n).take_while(|&k| (k as f64) < t).map(|k| b.pmf(k)).sum())
}

pub fn run(cfg: &ExperimentConfig) -> HarnessResult<Vec<ResultRow>> {
    let p = params(cfg)?;
    let mut rows = Vec::new();
    for &n in &p.n {
        for &prob in &p.p {
            for &delta in &p.delta {
                let b = chernoff_lower_tail(n, prob, delta)?;
                let exact = lower_tail_strict(n, prob, (1.0 - delta) * n as f64 * prob)?;
                rows.push(
                    ResultRow::new(cfg, rows.len() as u64)
                        .label("kind", "chernoff")
                        .value("n", n as f64)
                        .value("p", prob)
                        .value("delta", delta)
                        .prob("exact_tail", exact)
                        .value("raw_bound", b.raw)
                        .bound("chernoff", b.bound_value, "min(1, 2 exp(-delta^2 n p / 2))")
                        .check("bound_holds", exact <= b.bound_value + 1e-12),
                );
            }
            if prob > 0.5 {
                let b = chernoff_majority(n, prob)?;
                let exact = binomial(n, prob)?.cdf(n / 2);
                rows.push(
                    ResultRow::new(cfg, rows.len() as u64)
                        .label("kind", "majority")
                        .value("n", n as f64)
                        .value("p", prob)
                        .prob("exact_tail", exact)
                        .bound("chernoff_majority", b.bound_value, "exp(-n (p - 1/2)^2 / (2p))")
                        .check("bound_holds", exact <= b.bound_value + 1e-12),
                );
            }
        }
    }
    // random [0, 1]-valued distributions on up to 8 atoms
    let mut coins = Coins::from_seed(derive_seed(cfg.seed, 1));
    let mut rm_violations = 0u64;
    let mut avg_violations = 0u64;
    let mut min_rm_slack = f64::INFINITY;
    for _ in 0..p.tables {
        let atoms = 1 + coins.below(8) as usize;
        let values: Vec<f64> = (0..atoms).map(|_| coins.unit()).collect();
        let mut weights: Vec<f64> = (0..atoms).map(|_| coins.unit() + 1e-3).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let mean: f64 = values.iter().zip(&weights).map(|(v, w)| v * w).sum::<f64>().clamp(0.0, 1.0);
        let theta = 0.01 + 0.98 * coins.unit();
        let exact: f64 = values.iter().zip(&weights).filter(|(v, _)| **v >= theta).map(|(_, w)| w).sum();
        let bound = reverse_markov(mean, theta)?.bound_value;
        min_rm_slack = min_rm_slack.min(exact - bound);
        rm_violations += (exact < bound - 1e-12) as u64;

        let size = 1 + coins.below(64) as usize;
        let table: Vec<f64> = (0..size).map(|_| coins.unit()).collect();
        let eps = table.iter().sum::<f64>() / size as f64;
        let theta = coins.unit();
        match averaging_subset(&table, eps, theta) {
            Ok(sub) => {
                avg_violations += ((sub.len() as f64) < (1.0 - theta) * eps * size as f64 - 1e-9) as u64
            }
            Err(_) => avg_violations += 1,
        }
    }
    rows.push(
        ResultRow::new(cfg, rows.len() as u64)
            .label("kind", "reverse_markov")
            .value("distributions", p.tables as f64)
            .value("violations", rm_violations as f64)
            .value("min_slack", if p.tables > 0 { min_rm_slack } else { 0.0 })
            .check("bound_holds", rm_violations == 0),
    );
    rows.push(
        ResultRow::new(cfg, rows.len() as u64)
            .label("kind", "averaging")
            .value("tables", p.tables as f64)
            .value("violations", avg_violations as f64)
            .check("size_guarantee_holds", avg_violations == 0),
    );
    Ok(rows)
}
