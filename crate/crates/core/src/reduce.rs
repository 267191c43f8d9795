//! Reductions to decision inversion.
//!
//! [`search_from_decision`] recovers a preimage bit by bit: the amplified
//! decision inverter is run once per position `j` against `pi ∘ swap_{0,j}`,
//! whose preimage has bit `j` in the first-bit slot. Positions are counted
//! from the most significant bit, so `b_j` lands at weight `2^(n-1-j)`.
//!
//! [`unique_search_from_adpi`] turns an advice-free adaptive decision
//! inverter into a unique-search algorithm by planting the search instance as
//! a collision at the challenge image.

use serde::{Deserialize, Serialize};

use crate::amplify::{amplify_decision, AmplifiedDecision};
use crate::error::{ensure, Result};
use crate::inverter::{Advice, Inverter, InverterKind, Outcome, Resources};
use crate::oracle::{
    build_unique_search_oracles, first_bit, swap_first_with, OraclePath, Permutation,
    QueryOracle, SwapConjugatedOracle, UniqueSearchEmbedding,
};
use crate::rng::{derive_seed, Coins, SharedRandomness};
use crate::sim::ClassicalFunctionTable;

/// A search inverter assembled from `n` amplified decision inverters.
#[derive(Clone, Debug)]
pub struct SearchFromDecision<I> {
    amplified: AmplifiedDecision<I>,
    path: OraclePath,
}

pub fn search_from_decision<I: Inverter>(dpi: I, ell: u64) -> Result<SearchFromDecision<I>> {
    Ok(SearchFromDecision {
        amplified: amplify_decision(dpi, ell)?,
        path: OraclePath::Functional,
    })
}

impl<I: Inverter> SearchFromDecision<I> {
    /// Oracle path for both the swap conjugation and the amplifier's
    /// conjugated oracles.
    pub fn with_path(mut self, path: OraclePath) -> Self {
        self.amplified = self.amplified.with_path(path);
        self.path = path;
        self
    }

    pub fn ell(&self) -> u64 {
        self.amplified.ell()
    }
}

fn swapped(perm: &Permutation, j: usize) -> Result<Permutation> {
    let n = perm.n_bits();
    Permutation::from_table(
        (0..perm.size())
            .map(|x| perm.apply(swap_first_with(x, j, n)))
            .collect(),
    )
}

impl<I: Inverter> Inverter for SearchFromDecision<I> {
    fn name(&self) -> String {
        format!("search-from-{}", self.amplified.name())
    }

    fn kind(&self) -> InverterKind {
        InverterKind::Search
    }

    fn resources(&self, n_bits: usize) -> Resources {
        let a = self.amplified.resources(n_bits);
        let n = n_bits as u64;
        Resources {
            advice_qubits: n * a.advice_qubits,
            queries: n * a.queries,
            oracle_calls: n * a.oracle_calls,
        }
    }

    fn phase0(&self, perm: &Permutation, r: SharedRandomness) -> Result<(Advice, u64)> {
        let n = perm.n_bits();
        let mut parts = Vec::with_capacity(n);
        for j in 0..n {
            let (advice, _) = self.amplified.phase0(&swapped(perm, j)?, r.substream(j as u64))?;
            parts.push(advice);
        }
        Ok((Advice::Product(parts), 0))
    }

    fn phase1(
        &self,
        oracle: &mut dyn QueryOracle,
        advice: &Advice,
        _mu: u64,
        y: u64,
        r: SharedRandomness,
    ) -> Result<Outcome> {
        let n = oracle.n_bits();
        let parts = advice.parts();
        ensure!(parts.len() == n, "expected {n} advice registers");
        let budget = self.amplified.resources(n).oracle_calls;
        // sparse product distribution over x*, built bit by bit from the MSB
        let mut dist: Vec<(u64, f64)> = vec![(0, 1.0)];
        let mut logical = 0;
        for (j, part) in parts.iter().enumerate() {
            let mut swap = SwapConjugatedOracle::new(&mut *oracle, j, self.path)?.with_budget(budget);
            let out = self
                .amplified
                .phase1(&mut swap, part, 0, y, r.substream(j as u64))?;
            logical += out.logical_queries;
            let p1 = out.mass_of(1);
            let weight = 1u64 << (n - 1 - j);
            let mut next = Vec::with_capacity(dist.len() * 2);
            for &(x, p) in &dist {
                if p1 < 1.0 {
                    next.push((x, p * (1.0 - p1)));
                }
                if p1 > 0.0 {
                    next.push((x | weight, p * p1));
                }
            }
            dist = next;
        }
        Ok(Outcome {
            distribution: dist,
            logical_queries: logical,
            final_state: None,
        })
    }
}

/// An instance of unique search on `domain_bits` bits: `f` is 1 at most at
/// `marked`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniqueSearchInstance {
    pub domain_bits: usize,
    pub marked: Option<u64>,
}

impl UniqueSearchInstance {
    pub fn new(domain_bits: usize, marked: Option<u64>) -> Result<Self> {
        if let Some(j) = marked {
            ensure!(j < 1u64 << domain_bits, "marked element {j} out of range");
        }
        Ok(Self {
            domain_bits,
            marked,
        })
    }

    /// A YES instance with a uniform marked element, or the NO instance.
    pub fn random(domain_bits: usize, yes: bool, coins: &mut Coins) -> Self {
        let marked = yes.then(|| coins.below(1u64 << domain_bits));
        Self {
            domain_bits,
            marked,
        }
    }

    pub fn is_yes(&self) -> bool {
        self.marked.is_some()
    }

    pub fn function(&self) -> ClassicalFunctionTable {
        ClassicalFunctionTable::from_fn(self.domain_bits, 1, |j| (Some(j) == self.marked) as u64)
            .expect("indicator fits one bit")
    }
}

/// One run of the unique-search algorithm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniqueSearchRun {
    /// `true` for YES.
    pub answer: bool,
    /// The inverter's measured bit `b'`.
    pub inverter_bit: u64,
    pub case_bit: u64,
    pub target: u64,
    pub suffix: u64,
    pub f_queries: u64,
    pub inverter_queries: u64,
}

/// Decides `instance` with one run of `adpi`: draws `r`, `s` and `pi`, gets
/// `mu` from `phase0`, sets `t = pi(s || mu)`, runs `phase1` against the
/// embedded pair for `h_{f,pi,t,mu}` and outputs `b' xor s|_0` (1 = YES).
///
/// `seed` substreams: 0 for `r`, 1 for `s`, 2 for `pi`, 3 for the terminal
/// measurement.
pub fn unique_search_from_adpi(
    adpi: &dyn Inverter,
    n_bits: usize,
    instance: &UniqueSearchInstance,
    seed: u64,
    path: OraclePath,
) -> Result<UniqueSearchRun> {
    ensure!(adpi.kind() == InverterKind::Decision, "{} is not a decision inverter", adpi.name());
    let m = adpi.adaptive_bits();
    ensure!(m < n_bits, "m = {m} must be below n = {n_bits}");
    ensure!(
        instance.domain_bits == n_bits - m - 1,
        "instance has {} bits, reduction needs n - m - 1 = {}",
        instance.domain_bits,
        n_bits - m - 1
    );
    let declared = adpi.resources(n_bits);
    ensure!(declared.advice_qubits == 0, "the reduction needs an advice-free inverter");

    let r = SharedRandomness(derive_seed(seed, 0));
    let s = Coins::from_seed(derive_seed(seed, 1)).below(1u64 << (n_bits - m));
    let perm = Permutation::from_seed(n_bits, derive_seed(seed, 2));
    let (advice, mu) = adpi.phase0(&perm, r)?;
    ensure!(mu < 1u64 << m, "suffix {mu} does not fit {m} bits");
    let pre = (s << m) | mu;
    let target = perm.apply(pre);
    let case_bit = first_bit(pre, n_bits);
    let emb = UniqueSearchEmbedding {
        f: instance.function(),
        perm,
        target,
        suffix: mu,
        adaptive_bits: m,
        case_bit,
    };
    let mut oracle = build_unique_search_oracles(emb, path)?.with_budget(declared.oracle_calls);
    let out = adpi.phase1(&mut oracle, &advice, mu, target, r)?;
    let inverter_bit = out.sample(Coins::from_seed(derive_seed(seed, 3)).unit());
    let f_queries = oracle.f_oracle().query_count();
    ensure!(
        f_queries <= 2 * declared.queries,
        "{f_queries} queries to f exceed 2T = {}",
        2 * declared.queries
    );
    Ok(UniqueSearchRun {
        answer: (inverter_bit ^ case_bit) == 1,
        inverter_bit,
        case_bit,
        target,
        suffix: mu,
        f_queries,
        inverter_queries: out.logical_queries,
    })
}

/// Empirical error rates on NO (`p0`) and YES (`p1`) instances with their
/// binomial standard errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionalError {
    pub p0: f64,
    pub p1: f64,
    pub stderr0: f64,
    pub stderr1: f64,
    pub no_trials: u64,
    pub yes_trials: u64,
}

/// Runs `algorithm(instance, seed_i)` `trials` times on each side, cycling
/// through the given instances, with `seed_i = derive_seed(seed, i)` on the
/// NO side and `derive_seed(seed, trials + i)` on the YES side.
pub fn measure_distributional_error(
    mut algorithm: impl FnMut(&UniqueSearchInstance, u64) -> Result<bool>,
    yes_instances: &[UniqueSearchInstance],
    no_instances: &[UniqueSearchInstance],
    trials: u64,
    seed: u64,
) -> Result<DistributionalError> {
    ensure!(trials >= 1, "need at least one trial");
    ensure!(
        !yes_instances.is_empty() && !no_instances.is_empty(),
        "need YES and NO instances"
    );
    ensure!(
        yes_instances.iter().all(|i| i.is_yes()) && no_instances.iter().all(|i| !i.is_yes()),
        "instance lists are mislabeled"
    );
    let mut no_errors = 0u64;
    let mut yes_errors = 0u64;
    for i in 0..trials {
        let inst = &no_instances[(i % no_instances.len() as u64) as usize];
        no_errors += algorithm(inst, derive_seed(seed, i))? as u64;
        let inst = &yes_instances[(i % yes_instances.len() as u64) as usize];
        yes_errors += !algorithm(inst, derive_seed(seed, trials + i))? as u64;
    }
    let k = trials as f64;
    let (p0, p1) = (no_errors as f64 / k, yes_errors as f64 / k);
    Ok(DistributionalError {
        p0,
        p1,
        stderr0: (p0 * (1.0 - p0) / k).sqrt(),
        stderr1: (p1 * (1.0 - p1) / k).sqrt(),
        no_trials: trials,
        yes_trials: trials,
    })
}
