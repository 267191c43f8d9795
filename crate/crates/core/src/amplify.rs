//! Amplification by repetition over randomized instances.
//!
//! Both amplifiers parse `r` into `2l` substreams. Substream `i < l` yields the
//! conjugators `(sigma_1i, sigma_2i)` of iteration `i`; substream `l + i` is
//! the randomness handed to the base inverter in iteration `i`. Iteration `i`
//! runs the base on `sigma_1i ∘ pi ∘ sigma_2i` with challenge `sigma_1i(y)`.
//!
//! The base inverters return exact outcome distributions, and the iterations
//! are independent given `(pi, r)`, so the amplified outcome distribution is
//! computed exactly: the search version succeeds unless every iteration
//! fails, the decision version is a majority over independent bits.

use crate::error::{ensure, Result};
use crate::inverter::{Advice, Inverter, InverterKind, Outcome, Resources};
use crate::oracle::{compose_conjugated, map_input, Direction, OraclePath, Permutation, QueryOracle};
use crate::rng::SharedRandomness;

fn conjugate(perm: &Permutation, sigma1: &Permutation, sigma2: &Permutation) -> Result<Permutation> {
    sigma1.compose(&perm.compose(sigma2)?)
}

fn check_base(base: &dyn Inverter, kind: InverterKind, ell: u64) -> Result<()> {
    ensure!(ell >= 1, "repetition count must be at least 1");
    ensure!(base.kind() == kind, "{} is not a {:?} inverter", base.name(), kind);
    ensure!(
        base.adaptive_bits() == 0,
        "amplification needs a non-adaptive base, {} has m = {}",
        base.name(),
        base.adaptive_bits()
    );
    Ok(())
}

/// The `l`-fold repetition of a search inverter with a forward verification
/// query per iteration. Outputs the first verified candidate, else 0.
#[derive(Clone, Debug)]
pub struct AmplifiedSearch<I> {
    base: I,
    ell: u64,
    path: OraclePath,
}

pub fn amplify_search<I: Inverter>(base: I, ell: u64) -> Result<AmplifiedSearch<I>> {
    check_base(&base, InverterKind::Search, ell)?;
    Ok(AmplifiedSearch {
        base,
        ell,
        path: OraclePath::Functional,
    })
}

/// `ceil(ln(10) / epsilon)`.
pub fn restricted_ell(epsilon: f64) -> Result<u64> {
    ensure!(epsilon > 0.0 && epsilon <= 1.0, "epsilon {epsilon} outside (0, 1]");
    Ok((10f64.ln() / epsilon).ceil() as u64)
}

/// Repetition with `l = ceil(ln(10) / epsilon)`: for at least a fifth of the
/// pairs `(pi, y)` the success over `r` is at least 2/3.
pub fn amplify_search_restricted<I: Inverter>(base: I, epsilon: f64) -> Result<AmplifiedSearch<I>> {
    amplify_search(base, restricted_ell(epsilon)?)
}

/// The two query counts quoted for the restricted amplifier at base query
/// count `t`: `l (t + 1)` (what the repetition spends) and `(l + 1) t`.
pub fn restricted_query_counts(epsilon: f64, t: u64) -> Result<(u64, u64)> {
    let ell = restricted_ell(epsilon)?;
    Ok((ell * (t + 1), (ell + 1) * t))
}

impl<I: Inverter> AmplifiedSearch<I> {
    pub fn with_path(mut self, path: OraclePath) -> Self {
        self.path = path;
        self
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn base(&self) -> &I {
        &self.base
    }

    fn conjugators(&self, n_bits: usize, r: SharedRandomness, i: u64) -> (Permutation, Permutation) {
        let mut coins = r.substream(i).coins();
        let sigma1 = Permutation::random(n_bits, &mut coins);
        let sigma2 = Permutation::random(n_bits, &mut coins);
        (sigma1, sigma2)
    }
}

impl<I: Inverter> Inverter for AmplifiedSearch<I> {
    fn name(&self) -> String {
        format!("{}[{}]", self.base.name(), self.ell)
    }

    fn kind(&self) -> InverterKind {
        InverterKind::Search
    }

    fn resources(&self, n_bits: usize) -> Resources {
        let b = self.base.resources(n_bits);
        Resources {
            advice_qubits: self.ell * b.advice_qubits,
            queries: self.ell * (b.queries + 1),
            oracle_calls: self.ell * (2 * b.oracle_calls + 1),
        }
    }

    fn phase0(&self, perm: &Permutation, r: SharedRandomness) -> Result<(Advice, u64)> {
        let n = perm.n_bits();
        let mut parts = Vec::with_capacity(self.ell as usize);
        for i in 0..self.ell {
            let (s1, s2) = self.conjugators(n, r, i);
            let (advice, _) = self.base.phase0(&conjugate(perm, &s1, &s2)?, r.substream(self.ell + i))?;
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
        ensure!(parts.len() as u64 == self.ell, "expected {} advice registers", self.ell);
        let base_res = self.base.resources(n);
        let mut all_fail = 1.0;
        let mut preimage = None;
        let mut logical = 0;
        for i in 0..self.ell {
            let (s1, s2) = self.conjugators(n, r, i);
            let out = {
                let mut conj = compose_conjugated(&s1, &s2, &mut *oracle, y, self.path)?
                    .with_budget(base_res.oracle_calls);
                let image = conj.image();
                self.base
                    .phase1(&mut conj, &parts[i as usize], 0, image, r.substream(self.ell + i))?
            };
            ensure!(
                out.logical_queries <= base_res.queries,
                "base used {} queries, declared {}",
                out.logical_queries,
                base_res.queries
            );
            // verify sigma_2i(x_i) with one forward query on the measured candidate
            let candidates = map_input(&out.distribution, |x| s2.apply(x));
            oracle.charge(Direction::Forward, &candidates)?;
            let mut hit = 0.0;
            for &(c, p) in &candidates {
                if oracle.forward_value(c) == y {
                    hit += p;
                    preimage = Some(c);
                }
            }
            all_fail *= 1.0 - hit.min(1.0);
            logical += out.logical_queries + 1;
        }
        let distribution = match preimage {
            Some(c) if c != 0 && all_fail > 0.0 => vec![(c, 1.0 - all_fail), (0, all_fail)],
            Some(c) if c != 0 => vec![(c, 1.0)],
            _ => vec![(0, 1.0)],
        };
        Ok(Outcome {
            distribution,
            logical_queries: logical,
            final_state: None,
        })
    }
}

/// The `l`-fold repetition of a decision inverter with majority vote. The
/// second conjugator of iteration `i` flips the first bit with a coin `r*_i`,
/// which is undone on the returned bit. Ties resolve to 0.
#[derive(Clone, Debug)]
pub struct AmplifiedDecision<I> {
    base: I,
    ell: u64,
    path: OraclePath,
}

pub fn amplify_decision<I: Inverter>(base: I, ell: u64) -> Result<AmplifiedDecision<I>> {
    check_base(&base, InverterKind::Decision, ell)?;
    Ok(AmplifiedDecision {
        base,
        ell,
        path: OraclePath::Functional,
    })
}

impl<I: Inverter> AmplifiedDecision<I> {
    pub fn with_path(mut self, path: OraclePath) -> Self {
        self.path = path;
        self
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn base(&self) -> &I {
        &self.base
    }

    fn conjugators(&self, n_bits: usize, r: SharedRandomness, i: u64) -> Result<(Permutation, Permutation, u64)> {
        let mut coins = r.substream(i).coins();
        let sigma1 = Permutation::random(n_bits, &mut coins);
        let flip = coins.bit();
        let mask = flip << (n_bits - 1);
        let sigma2 = Permutation::from_table((0..1u64 << n_bits).map(|x| x ^ mask).collect())?;
        Ok((sigma1, sigma2, flip))
    }
}

impl<I: Inverter> Inverter for AmplifiedDecision<I> {
    fn name(&self) -> String {
        format!("{}[{}]", self.base.name(), self.ell)
    }

    fn kind(&self) -> InverterKind {
        InverterKind::Decision
    }

    fn resources(&self, n_bits: usize) -> Resources {
        let b = self.base.resources(n_bits);
        Resources {
            advice_qubits: self.ell * b.advice_qubits,
            queries: self.ell * b.queries,
            oracle_calls: self.ell * 2 * b.oracle_calls,
        }
    }

    fn phase0(&self, perm: &Permutation, r: SharedRandomness) -> Result<(Advice, u64)> {
        let n = perm.n_bits();
        let mut parts = Vec::with_capacity(self.ell as usize);
        for i in 0..self.ell {
            let (s1, s2, _) = self.conjugators(n, r, i)?;
            let (advice, _) = self.base.phase0(&conjugate(perm, &s1, &s2)?, r.substream(self.ell + i))?;
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
        ensure!(parts.len() as u64 == self.ell, "expected {} advice registers", self.ell);
        let base_res = self.base.resources(n);
        let mut ones = Vec::with_capacity(self.ell as usize);
        let mut logical = 0;
        for i in 0..self.ell {
            let (s1, s2, flip) = self.conjugators(n, r, i)?;
            let mut conj =
                compose_conjugated(&s1, &s2, &mut *oracle, y, self.path)?.with_budget(base_res.oracle_calls);
            let image = conj.image();
            let out = self
                .base
                .phase1(&mut conj, &parts[i as usize], 0, image, r.substream(self.ell + i))?;
            ensure!(
                out.logical_queries <= base_res.queries,
                "base used {} queries, declared {}",
                out.logical_queries,
                base_res.queries
            );
            logical += out.logical_queries;
            // b*_i = b_i xor r*_i
            ones.push(out.mass_of(1 ^ flip));
        }
        let p1 = majority_one_probability(&ones);
        let mut distribution = vec![(0, 1.0 - p1)];
        if p1 > 0.0 {
            distribution.push((1, p1));
        }
        Ok(Outcome {
            distribution,
            logical_queries: logical,
            final_state: None,
        })
    }
}

/// Distribution of the number of successes among independent Bernoulli
/// trials with success probabilities `ps`.
pub fn poisson_binomial(ps: &[f64]) -> Vec<f64> {
    let mut dist = vec![1.0];
    for &p in ps {
        let mut next = vec![0.0; dist.len() + 1];
        for (k, &q) in dist.iter().enumerate() {
            next[k] += q * (1.0 - p);
            next[k + 1] += q * p;
        }
        dist = next;
    }
    dist
}

/// Probability that strictly more than half of the independent bits with
/// `Pr[bit = 1] = ps[i]` are 1.
pub fn majority_one_probability(ps: &[f64]) -> f64 {
    let l = ps.len();
    poisson_binomial(ps)
        .iter()
        .enumerate()
        .filter(|(k, _)| 2 * k > l)
        .map(|(_, q)| q)
        .sum()
}

/// `1 - exp(-delta^2 l / (1 + 2 delta))`.
pub fn decision_success_bound(delta: f64, ell: u64) -> f64 {
    1.0 - (-delta * delta * ell as f64 / (1.0 + 2.0 * delta)).exp()
}

/// `1 - (1 - epsilon)^l`.
pub fn search_success(epsilon: f64, ell: u64) -> f64 {
    1.0 - (1.0 - epsilon).powi(ell as i32)
}

/// Smallest `l` with `exp(-delta^2 l / (1 + 2 delta)) <= target_failure`.
pub fn required_ell_decision(delta: f64, target_failure: f64) -> Result<u64> {
    ensure!(delta > 0.0 && delta <= 0.5, "delta {delta} outside (0, 1/2]");
    ensure!(
        target_failure > 0.0 && target_failure < 1.0,
        "target failure {target_failure} outside (0, 1)"
    );
    let raw = (1.0 + 2.0 * delta) * (1.0 / target_failure).ln() / (delta * delta);
    // guard against 8.000000000000002 style round-up
    let near = raw.round();
    let ell = if (raw - near).abs() < 1e-9 { near } else { raw.ceil() };
    Ok(ell.max(1.0) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inverter::{
        run_decision_experiment, run_search_experiment, EvalMode, FullTableInverter,
        PermutationSet, RandomnessSource, SyntheticDecisionInverter, SyntheticSearchInverter,
    };

    fn exact(count: u64) -> EvalMode {
        EvalMode::Exact {
            perms: PermutationSet::Sampled { count, seed: 1 },
            r_streams: 1,
            seed: 2,
        }
    }

    #[test]
    fn ell_formulas() {
        assert_eq!(restricted_ell(1.0).unwrap(), 3);
        assert_eq!(restricted_ell(0.1).unwrap(), 24);
        assert!(restricted_ell(0.0).is_err());
        assert_eq!(required_ell_decision(0.5, (-1f64).exp()).unwrap(), 8);
        assert_eq!(required_ell_decision(0.1, 0.01).unwrap(), 553);
        assert!(required_ell_decision(0.6, 0.1).is_err());
        assert_eq!(restricted_query_counts(1.0, 2).unwrap(), (9, 8));
    }

    #[test]
    fn full_table_repeated_once() {
        let base = FullTableInverter {
            kind: InverterKind::Search,
        };
        let amp = amplify_search(base, 1).unwrap();
        let res = run_search_experiment(&amp, 3, &exact(3)).unwrap();
        assert_eq!(res.success_probability, 1.0);
        assert_eq!(res.declared.queries, 1);
        assert_eq!(res.advice_qubits_used, 24);
    }

    #[test]
    fn synthetic_search_product_rule_away_from_zero() {
        let base = SyntheticSearchInverter::new(0.25, 1).unwrap();
        let amp = amplify_search(base, 4).unwrap();
        let res = run_search_experiment(&amp, 3, &exact(4)).unwrap();
        let want = search_success(0.25, 4);
        // the fallback output 0 is correct when pi^-1(y) = 0
        let with_zero = want + (1.0 - want) / 8.0;
        assert!((res.success_probability - with_zero).abs() < 1e-12);
        assert_eq!(res.queries_used, 8);
        assert_eq!(res.oracle_calls_used, 12);
    }

    #[test]
    fn majority_matches_binomial() {
        let d = poisson_binomial(&[0.6; 5]);
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let tail: f64 = (3..=5)
            .map(|k| {
                let c = [1.0, 5.0, 10.0, 10.0, 5.0, 1.0][k];
                c * 0.6f64.powi(k as i32) * 0.4f64.powi(5 - k as i32)
            })
            .sum();
        assert!((majority_one_probability(&[0.6; 5]) - tail).abs() < 1e-12);
        // tie goes to 0
        assert_eq!(majority_one_probability(&[1.0, 0.0]), 0.0);
    }

    #[test]
    fn perfect_decision_stays_perfect() {
        let base = SyntheticDecisionInverter::new(0.5, RandomnessSource::Measurement, 1).unwrap();
        let amp = amplify_decision(base, 4).unwrap();
        let res = run_decision_experiment(&amp, 3, &exact(3)).unwrap();
        assert!((res.success_probability - 1.0).abs() < 1e-12);
        assert_eq!(res.declared.queries, 4);
    }

    #[test]
    fn rejects_adaptive_or_wrong_kind() {
        let base = FullTableInverter {
            kind: InverterKind::Decision,
        };
        assert!(amplify_search(base.clone(), 2).is_err());
        assert!(amplify_decision(base, 0).is_err());
        let scan = crate::inverter::ScanDecisionInverter { adaptive_bits: 1 };
        assert!(amplify_decision(scan, 3).is_err());
    }
}
