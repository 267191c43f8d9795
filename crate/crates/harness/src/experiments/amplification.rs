//! Search amplification (repetition with verification) and decision
//! amplification (majority vote) on synthetic bases.

use perminv::amplify::{
    amplify_decision, amplify_search, amplify_search_restricted, decision_success_bound,
    majority_one_probability, poisson_binomial, restricted_ell, restricted_query_counts, search_success,
};
use perminv::inverter::{
    evaluate_instance, trial_plan, Inverter, InverterKind, RandomnessSource,
    SyntheticDecisionInverter, SyntheticSearchInverter,
};
use serde::Deserialize;
use statrs::distribution::{Binomial, Discrete, DiscreteCDF};

use super::{agrees, eval_mode, run_inversion};
use crate::config::ExperimentConfig;
use crate::error::{require, HarnessError, HarnessResult};
use crate::output::ResultRow;
use crate::parallel::map_ordered;

pub const SEARCH_CORE_OPS: &[&str] = &[
    "amplify_search",
    "amplify_search_restricted",
    "restricted_ell",
    "restricted_query_counts",
    "search_success",
];

pub const DECISION_CORE_OPS: &[&str] = &[
    "amplify_decision",
    "decision_success_bound",
    "majority_one_probability",
    "poisson_binomial",
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SearchParams {
    epsilon: Vec<f64>,
    ell: Vec<u64>,
    base_queries: u64,
    /// Also run the restricted repetition count for each epsilon.
    restricted: bool,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            epsilon: vec![0.1, 0.25, 0.5],
            ell: (1..=8).collect(),
            base_queries: 1,
            restricted: true,
        }
    }
}

fn search_params(cfg: &ExperimentConfig) -> HarnessResult<SearchParams> {
    let p: SearchParams = cfg.params()?;
    require(cfg.n_bits <= 6, "n_bits", "must be at most 6")?;
    require(!p.epsilon.is_empty(), "params.epsilon", "must not be empty")?;
    for (i, e) in p.epsilon.iter().enumerate() {
        require(*e > 0.0 && *e <= 1.0, &format!("params.epsilon[{i}]"), "must lie in (0, 1]")?;
    }
    for (i, l) in p.ell.iter().enumerate() {
        require((1..=64).contains(l), &format!("params.ell[{i}]"), "must lie in 1..=64")?;
    }
    require(p.base_queries <= 16, "params.base_queries", "must be at most 16")?;
    Ok(p)
}

pub fn validate_search(cfg: &ExperimentConfig) -> HarnessResult<()> {
    search_params(cfg).map(|_| ())
}

/// Mean success over the trials' permutations, restricted to challenges whose
/// preimage is not 0 (so the fallback output 0 is never accidentally right).
fn conditional_success(inv: &dyn Inverter, cfg: &ExperimentConfig) -> HarnessResult<f64> {
    let n = cfg.n_bits;
    let plan = trial_plan(n, 0, &eval_mode(cfg))?;
    let per_trial = map_ordered(&plan, |t| -> perminv::Result<f64> {
        let perm = t.permutation(n);
        let (advice, mu) = inv.phase0(&perm, t.r)?;
        let mut mass = 0.0;
        for x in 1..perm.size() {
            mass += evaluate_instance(inv, &perm, &advice, mu, x, t.r)?.success_mass;
        }
        Ok(mass / (perm.size() - 1) as f64)
    })?;
    Ok(per_trial.iter().sum::<f64>() / per_trial.len() as f64)
}

pub fn run_search(cfg: &ExperimentConfig) -> HarnessResult<Vec<ResultRow>> {
    let p = search_params(cfg)?;
    require(cfg.n_bits >= 1, "n_bits", "must be positive")?;
    let size = (1u64 << cfg.n_bits) as f64;
    let mode = eval_mode(cfg);
    let mut cells: Vec<(f64, u64, &str)> = Vec::new();
    for &e in &p.epsilon {
        for &l in &p.ell {
            cells.push((e, l, "fixed"));
        }
        if p.restricted {
            cells.push((e, restricted_ell(e)?, "restricted"));
        }
    }
    let mut rows = Vec::new();
    for (i, (eps, ell, variant)) in cells.into_iter().enumerate() {
        let base = SyntheticSearchInverter::new(eps, p.base_queries)?;
        let base_res = base.resources(cfg.n_bits);
        let amp = if variant == "restricted" {
            amplify_search_restricted(base, eps)?
        } else {
            amplify_search(base, ell)?
        };
        let res = run_inversion(&amp, InverterKind::Search, cfg.n_bits, &mode)?;
        let cond = conditional_success(&amp, cfg)?;
        let want = search_success(eps, ell);
        let combined = want + (1.0 - want) / size;
        let declared = res.declared;
        let mut row = ResultRow::new(cfg, i as u64)
            .label("inverter", &res.inverter)
            .label("variant", variant)
            .value("epsilon", eps)
            .value("ell", ell as f64)
            .prob("success", res.success_probability)
            .prob("success_preimage_nonzero", cond)
            .value("std_error", res.std_error)
            .value("advice_qubits_used", res.advice_qubits_used as f64)
            .value("queries_used", res.queries_used as f64)
            .value("oracle_calls_used", res.oracle_calls_used as f64)
            .value("declared_advice_qubits", declared.advice_qubits as f64)
            .value("declared_queries", declared.queries as f64)
            .bound("amplified_success", want, "1 - (1 - eps)^l")
            .bound("amplified_success_with_fallback", combined, "w + (1 - w)/N, w = 1 - (1 - eps)^l")
            .check("conditional_matches", agrees(cfg, cond, res.std_error, want, 1e-9))
            .check("overall_matches", agrees(cfg, res.success_probability, res.std_error, combined, 1e-9))
            .check(
                "resources_exact",
                declared.advice_qubits == ell * base_res.advice_qubits
                    && declared.queries == ell * (base_res.queries + 1)
                    && res.advice_qubits_used == declared.advice_qubits
                    && res.queries_used == declared.queries,
            );
        if variant == "restricted" {
            let (spent, quoted) = restricted_query_counts(eps, base_res.queries)?;
            row = row
                .value("restricted_queries_spent", spent as f64)
                .value("restricted_queries_quoted", quoted as f64)
                .check("restricted_spend_matches", spent == declared.queries);
        }
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct DecisionParams {
    delta: Vec<f64>,
    ell: Vec<u64>,
    source: RandomnessSource,
    base_queries: u64,
}

impl Default for DecisionParams {
    fn default() -> Self {
        Self {
            delta: vec![0.05, 0.1, 0.25],
            ell: vec![9, 25, 101, 201],
            source: RandomnessSource::Measurement,
            base_queries: 1,
        }
    }
}

fn decision_params(cfg: &ExperimentConfig) -> HarnessResult<DecisionParams> {
    let p: DecisionParams = cfg.params()?;
    require(cfg.n_bits <= 6, "n_bits", "must be at most 6")?;
    require(!p.delta.is_empty(), "params.delta", "must not be empty")?;
    for (i, d) in p.delta.iter().enumerate() {
        require(*d > 0.0 && *d <= 0.5, &format!("params.delta[{i}]"), "must lie in (0, 1/2]")?;
    }
    for (i, l) in p.ell.iter().enumerate() {
        require((1..=1001).contains(l), &format!("params.ell[{i}]"), "must lie in 1..=1001")?;
    }
    require(p.base_queries <= 16, "params.base_queries", "must be at most 16")?;
    Ok(p)
}

pub fn validate_decision(cfg: &ExperimentConfig) -> HarnessResult<()> {
    decision_params(cfg).map(|_| ())
}

/// Success of a majority over `ell` independent bits each right with
/// probability `p`, ties resolved to 0 (right for half of the challenges).
pub fn binomial_majority(ell: u64, p: f64) -> HarnessResult<f64> {
    let b = Binomial::new(p, ell).map_err(|e| HarnessError::Runtime(e.to_string()))?;
    let above = 1.0 - b.cdf(ell / 2);
    let tie = if ell.is_multiple_of(2) { 0.5 * b.pmf(ell / 2) } else { 0.0 };
    Ok(above + tie)
}

pub fn run_decision(cfg: &ExperimentConfig) -> HarnessResult<Vec<ResultRow>> {
    let p = decision_params(cfg)?;
    let mode = eval_mode(cfg);
    let mut rows = Vec::new();
    for &delta in &p.delta {
        for &ell in &p.ell {
            let base = SyntheticDecisionInverter::new(delta, p.source, p.base_queries)?;
            let base_res = base.resources(cfg.n_bits);
            let amp = amplify_decision(base, ell)?;
            let res = run_inversion(&amp, InverterKind::Decision, cfg.n_bits, &mode)?;
            let oracle = binomial_majority(ell, 0.5 + delta)?;
            let ps = vec![0.5 + delta; ell as usize];
            let pb = majority_one_probability(&ps);
            let tie = if ell.is_multiple_of(2) { poisson_binomial(&ps)[ell as usize / 2] } else { 0.0 };
            let lower = decision_success_bound(delta, ell);
            let declared = res.declared;
            rows.push(
                ResultRow::new(cfg, rows.len() as u64)
                    .label("inverter", &res.inverter)
                    .value("delta", delta)
                    .value("ell", ell as f64)
                    .prob("success", res.success_probability)
                    .value("std_error", res.std_error)
                    .prob("strict_majority_probability", pb)
                    .prob("tie_probability", tie)
                    .value("queries_used", res.queries_used as f64)
                    .value("advice_qubits_used", res.advice_qubits_used as f64)
                    .bound("binomial_tail", oracle, "Pr[Bin(l, 1/2+delta) > l/2] + Pr[= l/2]/2")
                    .bound("lower_bound", lower, "1 - exp(-delta^2 l / (1 + 2 delta))")
                    .check("matches_binomial_tail", agrees(cfg, res.success_probability, res.std_error, oracle, 1e-9))
                    .check("above_lower_bound", res.success_probability >= lower - 1e-12 || cfg.mode == crate::Mode::Sampled)
                    .check(
                        "resources_exact",
                        declared.queries == ell * base_res.queries
                            && declared.advice_qubits == ell * base_res.advice_qubits
                            && res.queries_used == declared.queries,
                    ),
            );
        }
    }
    Ok(rows)
}
