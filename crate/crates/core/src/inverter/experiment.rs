//! The search and decision inversion experiments.
//!
//! A run is split into trials. In exact mode a trial is one `(pi, r)` pair and
//! its success is the measurement mass on correct answers averaged over every
//! challenge `x`. In sampled mode a trial draws `pi`, `r`, `x` and the terminal
//! measurement and scores 0 or 1. Trials carry their own seeds, so
//! [`run_trial`] can be scheduled in any order and merged with
//! [`ExperimentResult::merge`] into identical statistics.

use serde::{Deserialize, Serialize};

use super::{Advice, Inverter, InverterKind, Outcome, Resources};
use crate::error::{contract, ensure, Error, Result};
use crate::oracle::{first_bit, make_two_sided, Permutation, QueryOracle};
use crate::rng::{derive_seed, Coins, SharedRandomness};

/// Which permutations an exact evaluation averages over.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PermutationSet {
    /// All `N!` permutations, `n <= 3` only.
    All,
    /// `count` uniform permutations drawn from `seed`.
    Sampled { count: u64, seed: u64 },
    Fixed(Vec<Permutation>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    /// Exact in `x` and in the terminal measurement; `r_streams` values of `r`
    /// per permutation.
    Exact {
        perms: PermutationSet,
        r_streams: u64,
        seed: u64,
    },
    Sampled { trials: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeLabel {
    Exact,
    Sampled,
}

#[derive(Clone, Debug)]
enum PermSource {
    Given(Permutation),
    Seed(u64),
}

/// One independently schedulable unit of an experiment.
#[derive(Clone, Debug)]
pub struct TrialSpec {
    pub index: u64,
    perm: PermSource,
    pub r: SharedRandomness,
    /// `Some` in sampled mode: the challenge and the measurement seed.
    sampled: Option<(u64, u64)>,
}

impl TrialSpec {
    pub fn permutation(&self, n_bits: usize) -> Permutation {
        match &self.perm {
            PermSource::Given(p) => p.clone(),
            PermSource::Seed(s) => Permutation::from_seed(n_bits, *s),
        }
    }
}

/// Lists the trials of an experiment. Sampled trial `i` uses
/// `derive_seed(seed, i)` and its substreams 0 (permutation), 1 (`r`),
/// 2 (challenge) and 3 (measurement).
pub fn trial_plan(n_bits: usize, adaptive_bits: usize, mode: &EvalMode) -> Result<Vec<TrialSpec>> {
    ensure!(adaptive_bits < n_bits, "m = {adaptive_bits} must be below n = {n_bits}");
    match mode {
        EvalMode::Exact {
            perms,
            r_streams,
            seed,
        } => {
            ensure!(*r_streams >= 1, "need at least one r stream");
            let sources: Vec<PermSource> = match perms {
                PermutationSet::All => {
                    ensure!(n_bits <= 3, "cannot enumerate all permutations at n = {n_bits}");
                    Permutation::all(n_bits).into_iter().map(PermSource::Given).collect()
                }
                PermutationSet::Sampled { count, seed } => (0..*count)
                    .map(|i| PermSource::Seed(derive_seed(*seed, i)))
                    .collect(),
                PermutationSet::Fixed(ps) => {
                    for p in ps {
                        ensure!(p.n_bits() == n_bits, "fixed permutation has wrong size");
                    }
                    ps.iter().cloned().map(PermSource::Given).collect()
                }
            };
            let mut out = Vec::with_capacity(sources.len() * *r_streams as usize);
            for perm in sources {
                for _ in 0..*r_streams {
                    let index = out.len() as u64;
                    out.push(TrialSpec {
                        index,
                        perm: perm.clone(),
                        r: SharedRandomness(derive_seed(derive_seed(*seed, index), 1)),
                        sampled: None,
                    });
                }
            }
            Ok(out)
        }
        EvalMode::Sampled { trials, seed } => {
            let k = 1u64 << (n_bits - adaptive_bits);
            Ok((0..*trials)
                .map(|i| {
                    let s = derive_seed(*seed, i);
                    TrialSpec {
                        index: i,
                        perm: PermSource::Seed(derive_seed(s, 0)),
                        r: SharedRandomness(derive_seed(s, 1)),
                        sampled: Some((
                            Coins::from_seed(derive_seed(s, 2)).below(k),
                            derive_seed(s, 3),
                        )),
                    }
                })
                .collect())
        }
    }
}

/// The result of inverting one challenge.
#[derive(Clone, Debug)]
pub struct InstanceOutcome {
    pub outcome: Outcome,
    /// Measurement mass on correct answers.
    pub success_mass: f64,
    /// Calls received by the real oracle pair.
    pub oracle_calls: u64,
}

/// What one trial contributes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub index: u64,
    pub success: f64,
    pub instances: u64,
    pub max_logical_queries: u64,
    pub max_oracle_calls: u64,
    pub advice_qubits: u64,
}

/// Fails unless the advice, `mu` and the query counts respect the declared
/// resources.
pub fn check_resources(
    declared: &Resources,
    adaptive_bits: usize,
    advice: &Advice,
    mu: u64,
    logical_queries: u64,
    oracle_calls: u64,
) -> Result<()> {
    if advice.qubits() > declared.advice_qubits {
        return Err(Error::AdviceExceeded {
            declared: declared.advice_qubits,
            produced: advice.qubits(),
        });
    }
    ensure!(mu < 1u64 << adaptive_bits, "suffix {mu} does not fit {adaptive_bits} bits");
    if logical_queries > declared.queries {
        return Err(Error::BudgetExceeded {
            budget: declared.queries,
            attempted: logical_queries,
        });
    }
    if oracle_calls > declared.oracle_calls {
        return Err(Error::BudgetExceeded {
            budget: declared.oracle_calls,
            attempted: oracle_calls,
        });
    }
    Ok(())
}

fn is_correct(kind: InverterKind, n_bits: usize, adaptive_bits: usize, x: u64, mu: u64, c: u64) -> bool {
    match kind {
        InverterKind::Search => c == x,
        InverterKind::Decision => c == first_bit((x << adaptive_bits) | mu, n_bits),
    }
}

/// Runs `phase1` on the challenge `y = pi(x || mu)` against a fresh oracle
/// pair whose budget is the declared number of oracle calls.
pub fn evaluate_instance(
    inv: &dyn Inverter,
    perm: &Permutation,
    advice: &Advice,
    mu: u64,
    x: u64,
    r: SharedRandomness,
) -> Result<InstanceOutcome> {
    let n = perm.n_bits();
    let m = inv.adaptive_bits();
    let declared = inv.resources(n);
    let y = perm.apply((x << m) | mu);
    let mut handle = make_two_sided(perm.clone(), y)?.with_budget(declared.oracle_calls);
    let outcome = inv.phase1(&mut handle, advice, mu, y, r)?;
    let oracle_calls = handle.query_count();
    check_resources(&declared, m, advice, mu, outcome.logical_queries, oracle_calls)?;
    let total: f64 = outcome.distribution.iter().map(|(_, p)| p).sum();
    ensure!(
        (total - 1.0).abs() < 1e-9,
        "outcome distribution of {} sums to {total}",
        inv.name()
    );
    let success_mass = outcome
        .distribution
        .iter()
        .filter(|&&(c, _)| is_correct(inv.kind(), n, m, x, mu, c))
        .map(|(_, p)| p)
        .sum();
    Ok(InstanceOutcome {
        outcome,
        success_mass,
        oracle_calls,
    })
}

pub fn run_trial(inv: &dyn Inverter, n_bits: usize, spec: &TrialSpec) -> Result<TrialOutcome> {
    let perm = spec.permutation(n_bits);
    let m = inv.adaptive_bits();
    let (advice, mu) = inv.phase0(&perm, spec.r)?;
    check_resources(&inv.resources(n_bits), m, &advice, mu, 0, 0)?;
    let mut out = TrialOutcome {
        index: spec.index,
        success: 0.0,
        instances: 0,
        max_logical_queries: 0,
        max_oracle_calls: 0,
        advice_qubits: advice.qubits(),
    };
    let challenges: Vec<u64> = match spec.sampled {
        Some((x, _)) => vec![x],
        None => (0..1u64 << (n_bits - m)).collect(),
    };
    let mut mass = 0.0;
    for &x in &challenges {
        let inst = evaluate_instance(inv, &perm, &advice, mu, x, spec.r)?;
        out.max_logical_queries = out.max_logical_queries.max(inst.outcome.logical_queries);
        out.max_oracle_calls = out.max_oracle_calls.max(inst.oracle_calls);
        mass += match spec.sampled {
            Some((_, meas)) => {
                let c = inst.outcome.sample(Coins::from_seed(meas).unit());
                is_correct(inv.kind(), n_bits, m, x, mu, c) as u64 as f64
            }
            None => inst.success_mass,
        };
    }
    out.instances = challenges.len() as u64;
    out.success = mass / challenges.len() as f64;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub inverter: String,
    pub kind: InverterKind,
    pub n_bits: usize,
    pub adaptive_bits: usize,
    pub mode: ModeLabel,
    pub seed: u64,
    pub success_probability: f64,
    /// Standard error of the mean over trials (sampled permutations or
    /// Bernoulli trials).
    pub std_error: f64,
    pub trials: u64,
    pub instances: u64,
    pub queries_used: u64,
    pub oracle_calls_used: u64,
    pub advice_qubits_used: u64,
    pub declared: Resources,
}

impl ExperimentResult {
    /// Folds trial outcomes, in index order, into a result.
    pub fn merge(
        inv: &dyn Inverter,
        n_bits: usize,
        mode: &EvalMode,
        mut trials: Vec<TrialOutcome>,
    ) -> Result<Self> {
        ensure!(!trials.is_empty(), "experiment has no trials");
        trials.sort_by_key(|t| t.index);
        let k = trials.len() as f64;
        let mean = trials.iter().map(|t| t.success).sum::<f64>() / k;
        let std_error = if trials.len() > 1 {
            let var = trials.iter().map(|t| (t.success - mean).powi(2)).sum::<f64>() / (k - 1.0);
            (var / k).sqrt()
        } else {
            0.0
        };
        let (label, seed) = match mode {
            EvalMode::Exact { seed, .. } => (ModeLabel::Exact, *seed),
            EvalMode::Sampled { seed, .. } => (ModeLabel::Sampled, *seed),
        };
        Ok(Self {
            inverter: inv.name(),
            kind: inv.kind(),
            n_bits,
            adaptive_bits: inv.adaptive_bits(),
            mode: label,
            seed,
            success_probability: mean.clamp(0.0, 1.0),
            std_error,
            trials: trials.len() as u64,
            instances: trials.iter().map(|t| t.instances).sum(),
            queries_used: trials.iter().map(|t| t.max_logical_queries).max().unwrap_or(0),
            oracle_calls_used: trials.iter().map(|t| t.max_oracle_calls).max().unwrap_or(0),
            advice_qubits_used: trials.iter().map(|t| t.advice_qubits).max().unwrap_or(0),
            declared: inv.resources(n_bits),
        })
    }
}

/// Runs every trial serially and merges.
pub fn run_experiment(inv: &dyn Inverter, n_bits: usize, mode: &EvalMode) -> Result<ExperimentResult> {
    let plan = trial_plan(n_bits, inv.adaptive_bits(), mode)?;
    let trials = plan
        .iter()
        .map(|t| run_trial(inv, n_bits, t))
        .collect::<Result<Vec<_>>>()?;
    ExperimentResult::merge(inv, n_bits, mode, trials)
}

pub fn run_search_experiment(
    inv: &dyn Inverter,
    n_bits: usize,
    mode: &EvalMode,
) -> Result<ExperimentResult> {
    if inv.kind() != InverterKind::Search {
        contract!("{} is not a search inverter", inv.name());
    }
    run_experiment(inv, n_bits, mode)
}

pub fn run_decision_experiment(
    inv: &dyn Inverter,
    n_bits: usize,
    mode: &EvalMode,
) -> Result<ExperimentResult> {
    if inv.kind() != InverterKind::Decision {
        contract!("{} is not a decision inverter", inv.name());
    }
    run_experiment(inv, n_bits, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inverter::{ConstantInverter, FullTableInverter};

    #[test]
    fn sampled_plan_is_reproducible() {
        let mode = EvalMode::Sampled { trials: 5, seed: 3 };
        let a = trial_plan(3, 0, &mode).unwrap();
        let b = trial_plan(3, 0, &mode).unwrap();
        for (s, t) in a.iter().zip(&b) {
            assert_eq!(s.permutation(3), t.permutation(3));
            assert_eq!(s.r, t.r);
            assert_eq!(s.sampled, t.sampled);
        }
        assert!(trial_plan(3, 3, &mode).is_err());
    }

    #[test]
    fn wrong_kind_rejected() {
        let inv = ConstantInverter {
            kind: InverterKind::Decision,
            value: 0,
        };
        let mode = EvalMode::Sampled { trials: 1, seed: 0 };
        assert!(run_search_experiment(&inv, 2, &mode).is_err());
    }

    #[test]
    fn full_table_all_permutations() {
        let inv = FullTableInverter {
            kind: InverterKind::Search,
        };
        let mode = EvalMode::Exact {
            perms: PermutationSet::All,
            r_streams: 1,
            seed: 0,
        };
        let res = run_search_experiment(&inv, 2, &mode).unwrap();
        assert_eq!(res.success_probability, 1.0);
        assert_eq!(res.trials, 24);
        assert_eq!(res.instances, 96);
        assert_eq!(res.advice_qubits_used, 8);
    }
}
