//! Two-phase permutation inverters and the inversion experiments.
//!
//! An inverter is a pair of procedures. `phase0` sees the whole permutation
//! and the shared randomness `r` and produces advice plus an `m`-bit suffix
//! `mu`. `phase1` gets the advice, `mu`, the challenge `y` and `r`, may query
//! the oracle pair, and ends with a terminal computational-basis measurement.
//! Instead of sampling that measurement, `phase1` returns the full outcome
//! distribution, so experiments can be evaluated exactly.
//!
//! Advice is always a classical basis state here; its size in qubits is the
//! number of bits of the stored labels.

mod baselines;
mod experiment;
mod grover;

pub use baselines::{
    ConstantInverter, FullTableInverter, LookupInverter, RandomnessSource, ScanDecisionInverter,
    SyntheticDecisionInverter, SyntheticSearchInverter,
};
pub use experiment::{
    check_resources, evaluate_instance, run_decision_experiment, run_experiment,
    run_search_experiment, run_trial, trial_plan, EvalMode, ExperimentResult, InstanceOutcome,
    ModeLabel, PermutationSet, TrialOutcome, TrialSpec,
};
pub use grover::{grover_spi, GroverInverter};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::oracle::{Permutation, QueryOracle};
use crate::rng::SharedRandomness;
use crate::sim::StateVector;

pub fn lookup_spi(n_bits: usize, known_fraction: f64) -> Result<LookupInverter> {
    LookupInverter::new(n_bits, known_fraction)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InverterKind {
    Search,
    Decision,
}

/// Declared resources at a given `n`.
///
/// `queries` is the logical query count `T` in the sense of the resource
/// statements (a query to a derived oracle counts once). `oracle_calls` is
/// what the real oracle pair handed to `phase1` actually receives, which is
/// larger when derived oracles spend two base queries per logical one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resources {
    pub advice_qubits: u64,
    pub queries: u64,
    pub oracle_calls: u64,
}

/// Classical advice, possibly a tensor product of several registers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Advice {
    Empty,
    /// `entries.len()` labels of `width` bits each.
    Classical { width: usize, entries: Vec<u64> },
    Product(Vec<Advice>),
}

impl Advice {
    pub fn qubits(&self) -> u64 {
        match self {
            Advice::Empty => 0,
            Advice::Classical { width, entries } => (*width * entries.len()) as u64,
            Advice::Product(parts) => parts.iter().map(Advice::qubits).sum(),
        }
    }

    /// The advice as a flat bit string, most significant bit of each label
    /// first, registers in order.
    pub fn to_bits(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.qubits() as usize);
        self.push_bits(&mut out);
        out
    }

    fn push_bits(&self, out: &mut Vec<bool>) {
        match self {
            Advice::Empty => {}
            Advice::Classical { width, entries } => {
                for &e in entries {
                    out.extend((0..*width).rev().map(|b| (e >> b) & 1 == 1));
                }
            }
            Advice::Product(parts) => parts.iter().for_each(|p| p.push_bits(out)),
        }
    }

    /// Advice with the register structure of `self` and labels read from
    /// `bits` (the inverse of [`Advice::to_bits`]).
    pub fn refill(&self, bits: &[bool]) -> Result<Advice> {
        let mut pos = 0;
        let out = self.refill_at(bits, &mut pos);
        crate::error::ensure!(pos == bits.len(), "advice expects {pos} bits, got {}", bits.len());
        Ok(out)
    }

    fn refill_at(&self, bits: &[bool], pos: &mut usize) -> Advice {
        match self {
            Advice::Empty => Advice::Empty,
            Advice::Classical { width, entries } => {
                let entries = (0..entries.len())
                    .map(|_| {
                        let mut v = 0u64;
                        for _ in 0..*width {
                            v = (v << 1) | bits.get(*pos).copied().unwrap_or(false) as u64;
                            *pos += 1;
                        }
                        v
                    })
                    .collect();
                Advice::Classical {
                    width: *width,
                    entries,
                }
            }
            Advice::Product(parts) => Advice::Product(parts.iter().map(|p| p.refill_at(bits, pos)).collect()),
        }
    }

    pub fn parts(&self) -> &[Advice] {
        match self {
            Advice::Product(parts) => parts,
            _ => std::slice::from_ref(self),
        }
    }

    pub(crate) fn entries(&self) -> &[u64] {
        match self {
            Advice::Classical { entries, .. } => entries,
            _ => &[],
        }
    }
}

/// What one run of `phase1` produces.
#[derive(Clone, Debug)]
pub struct Outcome {
    /// Measurement distribution over candidates, sparse, masses summing to 1.
    pub distribution: Vec<(u64, f64)>,
    /// Logical queries made.
    pub logical_queries: u64,
    /// The state just before measurement, for inverters that keep one.
    pub final_state: Option<StateVector>,
}

impl Outcome {
    pub fn point(candidate: u64, logical_queries: u64) -> Self {
        Self {
            distribution: vec![(candidate, 1.0)],
            logical_queries,
            final_state: None,
        }
    }

    /// Probability of measuring `candidate`.
    pub fn mass_of(&self, candidate: u64) -> f64 {
        self.distribution
            .iter()
            .filter(|(v, _)| *v == candidate)
            .map(|(_, p)| p)
            .sum()
    }

    /// Samples the terminal measurement with a uniform `u` in `[0, 1)`.
    pub fn sample(&self, u: f64) -> u64 {
        let mut acc = 0.0;
        for &(v, p) in &self.distribution {
            acc += p;
            if u < acc {
                return v;
            }
        }
        self.distribution.last().map(|&(v, _)| v).unwrap_or(0)
    }
}

/// A two-phase inverter.
pub trait Inverter: Send + Sync {
    fn name(&self) -> String;
    fn kind(&self) -> InverterKind;

    /// Length `m` of the suffix chosen by `phase0`.
    fn adaptive_bits(&self) -> usize {
        0
    }

    fn resources(&self, n_bits: usize) -> Resources;

    fn phase0(&self, perm: &Permutation, r: SharedRandomness) -> Result<(Advice, u64)>;

    fn phase1(
        &self,
        oracle: &mut dyn QueryOracle,
        advice: &Advice,
        mu: u64,
        y: u64,
        r: SharedRandomness,
    ) -> Result<Outcome>;
}

impl<I: Inverter + ?Sized> Inverter for std::sync::Arc<I> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn kind(&self) -> InverterKind {
        (**self).kind()
    }
    fn adaptive_bits(&self) -> usize {
        (**self).adaptive_bits()
    }
    fn resources(&self, n_bits: usize) -> Resources {
        (**self).resources(n_bits)
    }
    fn phase0(&self, perm: &Permutation, r: SharedRandomness) -> Result<(Advice, u64)> {
        (**self).phase0(perm, r)
    }
    fn phase1(
        &self,
        oracle: &mut dyn QueryOracle,
        advice: &Advice,
        mu: u64,
        y: u64,
        r: SharedRandomness,
    ) -> Result<Outcome> {
        (**self).phase1(oracle, advice, mu, y, r)
    }
}
