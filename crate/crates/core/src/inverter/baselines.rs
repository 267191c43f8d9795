use serde::{Deserialize, Serialize};

use super::{Advice, Inverter, InverterKind, Outcome, Resources};
use crate::error::{ensure, Result};
use crate::oracle::{first_bit, Permutation, QueryOracle};
use crate::rng::SharedRandomness;

fn no_queries(advice_qubits: u64) -> Resources {
    Resources {
        advice_qubits,
        queries: 0,
        oracle_calls: 0,
    }
}

/// Stores the whole answer table as advice: the inverse table for search,
/// the first bit of every preimage for decision. Makes no queries.
#[derive(Clone, Debug)]
pub struct FullTableInverter {
    pub kind: InverterKind,
}

impl Inverter for FullTableInverter {
    fn name(&self) -> String {
        format!("full-table-{:?}", self.kind).to_lowercase()
    }

    fn kind(&self) -> InverterKind {
        self.kind
    }

    fn resources(&self, n_bits: usize) -> Resources {
        let width = match self.kind {
            InverterKind::Search => n_bits as u64,
            InverterKind::Decision => 1,
        };
        no_queries(width << n_bits)
    }

    fn phase0(&self, perm: &Permutation, _r: SharedRandomness) -> Result<(Advice, u64)> {
        let n = perm.n_bits();
        let advice = match self.kind {
            InverterKind::Search => Advice::Classical {
                width: n,
                entries: perm.inverse_table().to_vec(),
            },
            InverterKind::Decision => Advice::Classical {
                width: 1,
                entries: perm.inverse_table().iter().map(|&x| first_bit(x, n)).collect(),
            },
        };
        Ok((advice, 0))
    }

    fn phase1(
        &self,
        _oracle: &mut dyn QueryOracle,
        advice: &Advice,
        _mu: u64,
        y: u64,
        _r: SharedRandomness,
    ) -> Result<Outcome> {
        let table = advice.entries();
        ensure!((y as usize) < table.len(), "advice does not cover image {y}");
        Ok(Outcome::point(table[y as usize], 0))
    }
}

/// Outputs a fixed candidate without advice or queries.
#[derive(Clone, Debug)]
pub struct ConstantInverter {
    pub kind: InverterKind,
    pub value: u64,
}

impl Inverter for ConstantInverter {
    fn name(&self) -> String {
        format!("constant-{:?}-{}", self.kind, self.value).to_lowercase()
    }

    fn kind(&self) -> InverterKind {
        self.kind
    }

    fn resources(&self, _n_bits: usize) -> Resources {
        no_queries(0)
    }

    fn phase0(&self, _perm: &Permutation, _r: SharedRandomness) -> Result<(Advice, u64)> {
        Ok((Advice::Empty, 0))
    }

    fn phase1(
        &self,
        _oracle: &mut dyn QueryOracle,
        _advice: &Advice,
        _mu: u64,
        _y: u64,
        _r: SharedRandomness,
    ) -> Result<Outcome> {
        Ok(Outcome::point(self.value, 0))
    }
}

/// Stores the preimages of `ceil(f N)` images picked with the shared
/// randomness; answers covered challenges from advice and guesses 0
/// otherwise.
#[derive(Clone, Debug)]
pub struct LookupInverter {
    n_bits: usize,
    known_fraction: f64,
}

impl LookupInverter {
    pub fn new(n_bits: usize, known_fraction: f64) -> Result<Self> {
        ensure!(
            (0.0..=1.0).contains(&known_fraction),
            "known fraction {known_fraction} outside [0, 1]"
        );
        ensure!(n_bits >= 1, "need at least one bit");
        Ok(Self {
            n_bits,
            known_fraction,
        })
    }

    fn covered_count(&self, n_bits: usize) -> usize {
        ((self.known_fraction * (1u64 << n_bits) as f64).ceil() as usize).min(1 << n_bits)
    }

    /// The covered images, in the order their preimages are stored.
    fn covered(&self, n_bits: usize, r: SharedRandomness) -> Vec<u64> {
        let shuffle = Permutation::random(n_bits, &mut r.substream(0).coins());
        shuffle.table()[..self.covered_count(n_bits)].to_vec()
    }
}

impl Inverter for LookupInverter {
    fn name(&self) -> String {
        format!("lookup-{}", self.known_fraction)
    }

    fn kind(&self) -> InverterKind {
        InverterKind::Search
    }

    fn resources(&self, n_bits: usize) -> Resources {
        no_queries((self.covered_count(n_bits) * n_bits) as u64)
    }

    fn phase0(&self, perm: &Permutation, r: SharedRandomness) -> Result<(Advice, u64)> {
        let n = perm.n_bits();
        ensure!(n == self.n_bits, "inverter built for n = {}, got {n}", self.n_bits);
        let entries = self.covered(n, r).iter().map(|&y| perm.invert(y)).collect();
        Ok((Advice::Classical { width: n, entries }, 0))
    }

    fn phase1(
        &self,
        oracle: &mut dyn QueryOracle,
        advice: &Advice,
        _mu: u64,
        y: u64,
        r: SharedRandomness,
    ) -> Result<Outcome> {
        let covered = self.covered(oracle.n_bits(), r);
        let guess = match covered.iter().position(|&c| c == y) {
            Some(k) => advice.entries()[k],
            None => 0,
        };
        Ok(Outcome::point(guess, 0))
    }
}

fn dummy_queries(oracle: &mut dyn QueryOracle, count: u64) -> Result<()> {
    for _ in 0..count {
        oracle.forward_classical(0)?;
    }
    Ok(())
}

/// A search inverter with success probability exactly `epsilon` on every
/// instance, independent across runs: it reads the answer from full-table
/// advice and outputs it with measurement probability `epsilon`, otherwise a
/// wrong candidate. `queries` dummy forward queries exercise the accounting.
#[derive(Clone, Debug)]
pub struct SyntheticSearchInverter {
    pub epsilon: f64,
    pub queries: u64,
}

impl SyntheticSearchInverter {
    pub fn new(epsilon: f64, queries: u64) -> Result<Self> {
        ensure!((0.0..=1.0).contains(&epsilon), "epsilon {epsilon} outside [0, 1]");
        Ok(Self { epsilon, queries })
    }
}

impl Inverter for SyntheticSearchInverter {
    fn name(&self) -> String {
        format!("synthetic-search-{}", self.epsilon)
    }

    fn kind(&self) -> InverterKind {
        InverterKind::Search
    }

    fn resources(&self, n_bits: usize) -> Resources {
        Resources {
            advice_qubits: (n_bits as u64) << n_bits,
            queries: self.queries,
            oracle_calls: self.queries,
        }
    }

    fn phase0(&self, perm: &Permutation, r: SharedRandomness) -> Result<(Advice, u64)> {
        FullTableInverter {
            kind: InverterKind::Search,
        }
        .phase0(perm, r)
    }

    fn phase1(
        &self,
        oracle: &mut dyn QueryOracle,
        advice: &Advice,
        _mu: u64,
        y: u64,
        _r: SharedRandomness,
    ) -> Result<Outcome> {
        dummy_queries(oracle, self.queries)?;
        let n = oracle.n_bits();
        let right = advice.entries()[y as usize];
        let wrong = (right + 1) % (1u64 << n);
        let mut distribution = vec![(right, self.epsilon)];
        if self.epsilon < 1.0 {
            distribution.push((wrong, 1.0 - self.epsilon));
        }
        Ok(Outcome {
            distribution,
            logical_queries: self.queries,
            final_state: None,
        })
    }
}

/// Where a synthetic decision inverter draws its bias from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomnessSource {
    /// The outcome distribution itself is biased (exactly evaluable).
    Measurement,
    /// A deterministic coin derived from `r` decides correctness.
    SharedRandomness,
}

/// A decision inverter that returns the right first bit with probability
/// `1/2 + delta` (`delta` may be negative).
#[derive(Clone, Debug)]
pub struct SyntheticDecisionInverter {
    pub delta: f64,
    pub source: RandomnessSource,
    pub queries: u64,
}

impl SyntheticDecisionInverter {
    pub fn new(delta: f64, source: RandomnessSource, queries: u64) -> Result<Self> {
        ensure!((-0.5..=0.5).contains(&delta), "delta {delta} outside [-1/2, 1/2]");
        Ok(Self {
            delta,
            source,
            queries,
        })
    }
}

impl Inverter for SyntheticDecisionInverter {
    fn name(&self) -> String {
        format!("synthetic-decision-{}", self.delta)
    }

    fn kind(&self) -> InverterKind {
        InverterKind::Decision
    }

    fn resources(&self, n_bits: usize) -> Resources {
        Resources {
            advice_qubits: 1u64 << n_bits,
            queries: self.queries,
            oracle_calls: self.queries,
        }
    }

    fn phase0(&self, perm: &Permutation, r: SharedRandomness) -> Result<(Advice, u64)> {
        FullTableInverter {
            kind: InverterKind::Decision,
        }
        .phase0(perm, r)
    }

    fn phase1(
        &self,
        oracle: &mut dyn QueryOracle,
        advice: &Advice,
        _mu: u64,
        y: u64,
        r: SharedRandomness,
    ) -> Result<Outcome> {
        dummy_queries(oracle, self.queries)?;
        let truth = advice.entries()[y as usize];
        let p = 0.5 + self.delta;
        let distribution = match self.source {
            RandomnessSource::Measurement => {
                let mut d = vec![(truth, p)];
                if p < 1.0 {
                    d.push((1 - truth, 1.0 - p));
                }
                d
            }
            RandomnessSource::SharedRandomness => {
                let correct = r.substream(u64::MAX).coins().bernoulli(p);
                vec![(if correct { truth } else { 1 - truth }, 1.0)]
            }
        };
        Ok(Outcome {
            distribution,
            logical_queries: self.queries,
            final_state: None,
        })
    }
}

/// An adaptive decision inverter without advice that is always right: it
/// picks `mu` from `r`, then queries `pi(x || mu)` for `x = 0, 1, ...` until
/// it hits `y`, and outputs the first bit of that preimage.
#[derive(Clone, Debug)]
pub struct ScanDecisionInverter {
    pub adaptive_bits: usize,
}

impl Inverter for ScanDecisionInverter {
    fn name(&self) -> String {
        format!("scan-decision-m{}", self.adaptive_bits)
    }

    fn kind(&self) -> InverterKind {
        InverterKind::Decision
    }

    fn adaptive_bits(&self) -> usize {
        self.adaptive_bits
    }

    fn resources(&self, n_bits: usize) -> Resources {
        let t = 1u64 << (n_bits - self.adaptive_bits.min(n_bits));
        Resources {
            advice_qubits: 0,
            queries: t,
            oracle_calls: t,
        }
    }

    fn phase0(&self, perm: &Permutation, r: SharedRandomness) -> Result<(Advice, u64)> {
        ensure!(self.adaptive_bits < perm.n_bits(), "m must be below n");
        let mu = r.substream(0).coins().below(1u64 << self.adaptive_bits);
        Ok((Advice::Empty, mu))
    }

    fn phase1(
        &self,
        oracle: &mut dyn QueryOracle,
        _advice: &Advice,
        mu: u64,
        y: u64,
        _r: SharedRandomness,
    ) -> Result<Outcome> {
        let n = oracle.n_bits();
        let m = self.adaptive_bits;
        for x in 0..1u64 << (n - m) {
            let w = (x << m) | mu;
            if oracle.forward_classical(w)? == y {
                return Ok(Outcome::point(first_bit(w, n), x + 1));
            }
        }
        Ok(Outcome::point(0, 1u64 << (n - m)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::make_two_sided;

    #[test]
    fn lookup_covers_requested_fraction() {
        let inv = LookupInverter::new(3, 0.5).unwrap();
        assert_eq!(inv.resources(3).advice_qubits, 4 * 3);
        let p = Permutation::from_seed(3, 1);
        let r = SharedRandomness(9);
        let (advice, _) = inv.phase0(&p, r).unwrap();
        let mut hits = 0;
        for x in 0..8 {
            let mut h = make_two_sided(p.clone(), p.apply(x)).unwrap();
            let o = inv.phase1(&mut h, &advice, 0, p.apply(x), r).unwrap();
            hits += (o.distribution[0].0 == x) as u32;
        }
        assert!((4..=5).contains(&hits));
        assert!(LookupInverter::new(3, 1.5).is_err());
    }

    #[test]
    fn scan_finds_preimage_with_suffix() {
        let inv = ScanDecisionInverter { adaptive_bits: 1 };
        let p = Permutation::from_seed(4, 3);
        let r = SharedRandomness(4);
        let (_, mu) = inv.phase0(&p, r).unwrap();
        for x in 0..8u64 {
            let w = (x << 1) | mu;
            let mut h = make_two_sided(p.clone(), p.apply(w)).unwrap();
            let o = inv.phase1(&mut h, &Advice::Empty, mu, p.apply(w), r).unwrap();
            assert_eq!(o.distribution, vec![(first_bit(w, 4), 1.0)]);
            assert_eq!(h.query_count(), x + 1);
        }
    }

    #[test]
    fn synthetic_decision_from_shared_randomness_is_deterministic() {
        let inv = SyntheticDecisionInverter::new(0.1, RandomnessSource::SharedRandomness, 2).unwrap();
        let p = Permutation::from_seed(3, 0);
        let (a, _) = inv.phase0(&p, SharedRandomness(1)).unwrap();
        let mut h = make_two_sided(p.clone(), 3).unwrap();
        let o1 = inv.phase1(&mut h, &a, 0, 3, SharedRandomness(5)).unwrap();
        let o2 = inv.phase1(&mut h, &a, 0, 3, SharedRandomness(5)).unwrap();
        assert_eq!(o1.distribution, o2.distribution);
        assert_eq!(h.query_count(), 4);
    }
}
