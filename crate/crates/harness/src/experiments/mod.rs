//! The registered experiments. Each module exposes `validate`, `run` and the
//! list of core operations it exercises.

pub mod amplification;
pub mod grover;
pub mod qrac;
pub mod reductions;
pub mod rp;
pub mod swapping;
pub mod tail_bounds;

use perminv::inverter::{
    run_trial, trial_plan, EvalMode, ExperimentResult, Inverter, InverterKind, PermutationSet,
};
use perminv::rng::derive_seed;

use crate::config::{ExperimentConfig, Mode};
use crate::error::{HarnessError, HarnessResult};
use crate::parallel::map_ordered;

/// Exact mode averages over `trials` sampled permutations; sampled mode
/// draws `trials` full instances.
pub(crate) fn eval_mode(cfg: &ExperimentConfig) -> EvalMode {
    match cfg.mode {
        Mode::Exact => EvalMode::Exact {
            perms: PermutationSet::Sampled {
                count: cfg.trials,
                seed: derive_seed(cfg.seed, 0),
            },
            r_streams: 1,
            seed: cfg.seed,
        },
        Mode::Sampled => EvalMode::Sampled {
            trials: cfg.trials,
            seed: cfg.seed,
        },
    }
}

/// The inversion experiment with trials spread over the pool.
pub(crate) fn run_inversion(
    inv: &dyn Inverter,
    kind: InverterKind,
    n_bits: usize,
    mode: &EvalMode,
) -> HarnessResult<ExperimentResult> {
    if inv.kind() != kind {
        return Err(HarnessError::Config(format!("{} is not a {kind:?} inverter", inv.name())));
    }
    let plan = trial_plan(n_bits, inv.adaptive_bits(), mode)?;
    let trials = map_ordered(&plan, |t| run_trial(inv, n_bits, t))?;
    Ok(ExperimentResult::merge(inv, n_bits, mode, trials)?)
}

/// Agreement check: within `tol` in exact mode, within four standard
/// errors (plus `tol`) in sampled mode.
pub(crate) fn agrees(cfg: &ExperimentConfig, measured: f64, std_error: f64, expected: f64, tol: f64) -> bool {
    match cfg.mode {
        Mode::Exact => (measured - expected).abs() <= tol,
        Mode::Sampled => (measured - expected).abs() <= 4.0 * std_error + tol,
    }
}

/// Standard error of a Bernoulli mean with success probability `p`.
pub(crate) fn bernoulli_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}
