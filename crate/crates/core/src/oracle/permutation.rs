use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ensure, Result};
use crate::rng::Coins;
use crate::sim::ClassicalFunctionTable;

/// A bijection on `[N]`, `N = 2^n_bits`, with its inverse table precomputed.
///
/// Serializes as a JSON array of the forward table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    n_bits: usize,
    forward: Arc<[u64]>,
    inverse: Arc<[u64]>,
}

impl Permutation {
    pub fn from_table(table: Vec<u64>) -> Result<Self> {
        let n = table.len();
        ensure!(
            n.is_power_of_two() && n >= 2,
            "permutation size {n} is not a power of two >= 2"
        );
        let mut inverse = vec![u64::MAX; n];
        for (x, &v) in table.iter().enumerate() {
            ensure!((v as usize) < n, "value {v} out of range [0, {n})");
            ensure!(inverse[v as usize] == u64::MAX, "value {v} appears twice");
            inverse[v as usize] = x as u64;
        }
        Ok(Self {
            n_bits: n.trailing_zeros() as usize,
            forward: table.into(),
            inverse: inverse.into(),
        })
    }

    pub fn identity(n_bits: usize) -> Self {
        Self::from_table((0..1u64 << n_bits).collect()).expect("identity is a bijection")
    }

    /// Uniform permutation by Fisher-Yates: for `i = N-1` down to `1`, swap
    /// position `i` with a uniform `j` in `[0, i]` drawn by
    /// [`Coins::below`]. The output depends only on `coins`' seed.
    pub fn random(n_bits: usize, coins: &mut Coins) -> Self {
        let n = 1usize << n_bits;
        let mut table: Vec<u64> = (0..n as u64).collect();
        for i in (1..n).rev() {
            let j = coins.below(i as u64 + 1) as usize;
            table.swap(i, j);
        }
        Self::from_table(table).expect("shuffle of identity is a bijection")
    }

    pub fn from_seed(n_bits: usize, seed: u64) -> Self {
        Self::random(n_bits, &mut Coins::from_seed(seed))
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn size(&self) -> u64 {
        self.forward.len() as u64
    }

    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        self.forward[x as usize]
    }

    #[inline]
    pub fn invert(&self, y: u64) -> u64 {
        self.inverse[y as usize]
    }

    pub fn table(&self) -> &[u64] {
        &self.forward
    }

    pub fn inverse_table(&self) -> &[u64] {
        &self.inverse
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            n_bits: self.n_bits,
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    /// `self ∘ inner`, i.e. `x -> self(inner(x))`.
    pub fn compose(&self, inner: &Permutation) -> Result<Permutation> {
        ensure!(self.n_bits == inner.n_bits, "composing permutations of different sizes");
        Permutation::from_table(inner.forward.iter().map(|&x| self.apply(x)).collect())
    }

    pub fn as_function(&self) -> ClassicalFunctionTable {
        ClassicalFunctionTable::new(self.n_bits, self.n_bits, self.forward.to_vec())
            .expect("permutation values fit n bits")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("integer arrays always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        match serde_json::from_str(s) {
            Ok(p) => Ok(p),
            Err(e) => crate::error::contract!("bad permutation json: {e}"),
        }
    }

    /// Every permutation of `[2^n_bits]` in lexicographic order. Only sensible
    /// for `n_bits <= 3`.
    pub fn all(n_bits: usize) -> Vec<Permutation> {
        let n = 1u64 << n_bits;
        let mut out = Vec::new();
        let mut cur: Vec<u64> = (0..n).collect();
        loop {
            out.push(Permutation::from_table(cur.clone()).unwrap());
            // next lexicographic permutation
            let Some(i) = (0..cur.len() - 1).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.forward.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let table = Vec::<u64>::deserialize(d)?;
        Permutation::from_table(table).map_err(serde::de::Error::custom)
    }
}

/// Most significant bit of an `n_bits`-bit value (the "first bit").
#[inline]
pub fn first_bit(x: u64, n_bits: usize) -> u64 {
    (x >> (n_bits - 1)) & 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_table(vec![0, 0, 1, 2]).is_err());
        assert!(Permutation::from_table(vec![0, 1, 2]).is_err());
        assert!(Permutation::from_table(vec![0, 1, 2, 4]).is_err());
    }

    #[test]
    fn seeded_sampler_is_stable() {
        let a = Permutation::from_seed(4, 99);
        let b = Permutation::from_seed(4, 99);
        assert_eq!(a, b);
        assert_ne!(a, Permutation::from_seed(4, 100));
    }

    #[test]
    fn json_round_trip() {
        let p = Permutation::from_seed(3, 5);
        let s = p.to_json();
        assert!(s.starts_with('['));
        assert_eq!(Permutation::from_json(&s).unwrap(), p);
        assert!(Permutation::from_json("[0,0]").is_err());
    }

    #[test]
    fn enumerates_all_permutations() {
        let all = Permutation::all(2);
        assert_eq!(all.len(), 24);
        let mut tables: Vec<_> = all.iter().map(|p| p.table().to_vec()).collect();
        tables.dedup();
        assert_eq!(tables.len(), 24);
    }

    #[test]
    fn sampler_is_roughly_uniform_on_small_domain() {
        // 24 permutations of [4]; 24_000 draws -> ~1000 each
        let mut counts = std::collections::HashMap::new();
        let mut coins = Coins::from_seed(3);
        for _ in 0..24_000 {
            *counts.entry(Permutation::random(2, &mut coins).table().to_vec()).or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), 24);
        assert!(counts.values().all(|&c| (850..1150).contains(&c)), "{counts:?}");
    }

    proptest! {
        #[test]
        fn inverse_is_consistent(seed in any::<u64>(), n in 1usize..7) {
            let p = Permutation::from_seed(n, seed);
            for x in 0..p.size() {
                prop_assert_eq!(p.invert(p.apply(x)), x);
            }
            let id = p.compose(&p.inverse()).unwrap();
            prop_assert_eq!(id, Permutation::identity(n));
        }
    }
}
