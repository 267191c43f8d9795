//! Search from decision, and unique search from an advice-free adaptive
//! decision inverter.

use std::cell::Cell;

use perminv::amplify::required_ell_decision;
use perminv::inverter::{Inverter, InverterKind};
use perminv::oracle::OraclePath;
use perminv::reduce::{
    measure_distributional_error, search_from_decision, unique_search_from_adpi,
    UniqueSearchInstance,
};
use serde::Deserialize;

use super::{agrees, bernoulli_sigma, eval_mode, run_inversion};
use crate::config::{ExperimentConfig, Mode};
use crate::error::{require, HarnessResult};
use crate::inverters::InverterChoice;
use crate::output::ResultRow;

pub const SEARCH_CORE_OPS: &[&str] = &["search_from_decision", "required_ell_decision"];

pub const UNIQUE_CORE_OPS: &[&str] = &["unique_search_from_adpi", "measure_distributional_error"];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SearchParams {
    base: InverterChoice,
    /// Repetitions per bit; by default chosen from `target_failure` for a
    /// synthetic base and 1 otherwise.
    ell: Option<u64>,
    /// Per-bit failure target; defaults to `0.01 / n`.
    target_failure: Option<f64>,
    path: OraclePath,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            base: InverterChoice::FullTable {
                problem: InverterKind::Decision,
            },
            ell: None,
            target_failure: None,
            path: OraclePath::Functional,
        }
    }
}

fn search_setup(cfg: &ExperimentConfig) -> HarnessResult<(SearchParams, u64, f64)> {
    let p: SearchParams = cfg.params()?;
    require(cfg.n_bits <= 6, "n_bits", "must be at most 6")?;
    let target = p.target_failure.unwrap_or(0.01 / cfg.n_bits as f64);
    require(target > 0.0 && target < 1.0, "params.target_failure", "must lie in (0, 1)")?;
    let base = p.base.build(cfg.n_bits, "params.base")?;
    require(base.kind() == InverterKind::Decision, "params.base", "must be a decision inverter")?;
    require(base.adaptive_bits() == 0, "params.base", "must be non-adaptive")?;
    let ell = match (p.ell, &p.base) {
        (Some(l), _) => l,
        (None, InverterChoice::SyntheticDecision { delta, .. }) => {
            require(*delta > 0.0, "params.base.delta", "must be positive to choose ell")?;
            required_ell_decision(*delta, target)?
        }
        (None, _) => 1,
    };
    require((1..=1001).contains(&ell), "params.ell", "must lie in 1..=1001")?;
    Ok((p, ell, target))
}

pub fn validate_search(cfg: &ExperimentConfig) -> HarnessResult<()> {
    search_setup(cfg).map(|_| ())
}

pub fn run_search(cfg: &ExperimentConfig) -> HarnessResult<Vec<ResultRow>> {
    let (p, ell, target) = search_setup(cfg)?;
    let n = cfg.n_bits as u64;
    let base = p.base.build(cfg.n_bits, "params.base")?;
    let base_res = base.resources(cfg.n_bits);
    let inv = search_from_decision(base, ell)?.with_path(p.path);
    let res = run_inversion(&inv, InverterKind::Search, cfg.n_bits, &eval_mode(cfg))?;
    let declared = res.declared;
    let total_failure = (n as f64 * target).min(1.0);
    let floor = 1.0 - total_failure;
    let meets = match cfg.mode {
        Mode::Exact => res.success_probability >= floor - 1e-12,
        Mode::Sampled => res.success_probability >= floor - 4.0 * res.std_error,
    };
    let mut row = ResultRow::new(cfg, 0)
        .label("inverter", &res.inverter)
        .value("ell", ell as f64)
        .prob("success", res.success_probability)
        .value("std_error", res.std_error)
        .value("advice_qubits_used", res.advice_qubits_used as f64)
        .value("queries_used", res.queries_used as f64)
        .value("declared_advice_qubits", declared.advice_qubits as f64)
        .value("declared_queries", declared.queries as f64)
        .bound("success_floor", floor, "1 - n * target_failure")
        .check(
            "resources_exact",
            declared.advice_qubits == n * ell * base_res.advice_qubits
                && declared.queries == n * ell * base_res.queries
                && res.advice_qubits_used == declared.advice_qubits
                && res.queries_used <= declared.queries,
        )
        .check("meets_success_floor", meets);
    if base_res.queries == 0 && matches!(p.base, InverterChoice::FullTable { .. }) {
        row = row.check("perfect_base_is_exact", res.success_probability == 1.0);
    }
    Ok(vec![row])
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct UniqueParams {
    adpi: InverterChoice,
    /// Advantage of the inverter, for the expected error pair.
    delta: f64,
    path: OraclePath,
}

impl Default for UniqueParams {
    fn default() -> Self {
        Self {
            adpi: InverterChoice::ScanDecision { adaptive_bits: 0 },
            delta: 0.5,
            path: OraclePath::Functional,
        }
    }
}

fn unique_setup(cfg: &ExperimentConfig) -> HarnessResult<(UniqueParams, std::sync::Arc<dyn Inverter>)> {
    let p: UniqueParams = cfg.params()?;
    require(cfg.n_bits <= 10, "n_bits", "must be at most 10")?;
    require((0.0..=0.5).contains(&p.delta), "params.delta", "must lie in [0, 1/2]")?;
    let adpi = p.adpi.build(cfg.n_bits, "params.adpi")?;
    require(adpi.kind() == InverterKind::Decision, "params.adpi", "must be a decision inverter")?;
    require(
        adpi.adaptive_bits() + 1 < cfg.n_bits,
        "params.adpi",
        "needs n - m - 1 >= 1",
    )?;
    require(adpi.resources(cfg.n_bits).advice_qubits == 0, "params.adpi", "must use no advice")?;
    Ok((p, adpi))
}

pub fn validate_unique(cfg: &ExperimentConfig) -> HarnessResult<()> {
    unique_setup(cfg).map(|_| ())
}

pub fn run_unique(cfg: &ExperimentConfig) -> HarnessResult<Vec<ResultRow>> {
    let (p, adpi) = unique_setup(cfg)?;
    let n = cfg.n_bits;
    let domain = n - adpi.adaptive_bits() - 1;
    let yes: Vec<UniqueSearchInstance> = (0..1u64 << domain)
        .map(|j| UniqueSearchInstance::new(domain, Some(j)))
        .collect::<perminv::Result<_>>()?;
    let no = vec![UniqueSearchInstance::new(domain, None)?];
    let max_f = Cell::new(0u64);
    let err = measure_distributional_error(
        |inst, seed| {
            let run = unique_search_from_adpi(adpi.as_ref(), n, inst, seed, p.path)?;
            max_f.set(max_f.get().max(run.f_queries));
            Ok(run.answer)
        },
        &yes,
        &no,
        cfg.trials,
        cfg.seed,
    )?;
    let t = adpi.resources(n).queries;
    let (want0, want1) = (0.5 - p.delta, 0.5);
    let sigma0 = bernoulli_sigma(want0, cfg.trials);
    let sigma1 = bernoulli_sigma(want1, cfg.trials);
    // the reduction is sampled by construction
    let sampled = ExperimentConfig {
        mode: Mode::Sampled,
        ..cfg.clone()
    };
    Ok(vec![ResultRow::new(cfg, 0)
        .label("inverter", adpi.name())
        .value("domain_bits", domain as f64)
        .prob("no_error", err.p0)
        .prob("yes_error", err.p1)
        .value("no_std_error", err.stderr0)
        .value("yes_std_error", err.stderr1)
        .value("max_f_queries", max_f.get() as f64)
        .bound("no_error_expected", want0, "1/2 - delta")
        .bound("yes_error_expected", want1, "1/2")
        .bound("f_query_limit", (2 * t) as f64, "2T")
        .check("no_error_matches", agrees(&sampled, err.p0, sigma0, want0, 0.0))
        .check("yes_error_matches", agrees(&sampled, err.p1, sigma1, want1, 0.0))
        .check("f_queries_within_2t", max_f.get() <= 2 * t)])
}
