//! Bijective ranks for the fields of an encoding.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{ensure, Result};

/// Bits needed to store one of `count` values: `ceil(log2 count)`, 0 when
/// `count <= 1`.
pub fn bits_for(count: &BigUint) -> u64 {
    if *count <= BigUint::one() {
        0
    } else {
        (count - 1u32).bits()
    }
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `n (n-1) ... (n-k+1)`, the number of injections from `[k]` into `[n]`.
pub fn falling_factorial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    (n - k + 1..=n).fold(BigUint::one(), |acc, v| acc * v)
}

pub fn factorial(n: u64) -> BigUint {
    falling_factorial(n, n)
}

/// Rank of a sequence of distinct values in `[n]` among all such sequences of
/// the same length, in lexicographic order (mixed radix `n, n-1, ...`). For a
/// full-length sequence this is the Lehmer code of a permutation.
pub fn rank_injection(values: &[u64], n: u64) -> Result<BigUint> {
    ensure!(values.len() as u64 <= n, "sequence longer than the range");
    let mut used = vec![false; n as usize];
    let mut rank = BigUint::zero();
    for (i, &v) in values.iter().enumerate() {
        ensure!(v < n && !used[v as usize], "value {v} repeated or out of range");
        let digit = used[..v as usize].iter().filter(|&&u| !u).count() as u64;
        rank = rank * (n - i as u64) + digit;
        used[v as usize] = true;
    }
    Ok(rank)
}

pub fn unrank_injection(rank: &BigUint, n: u64, len: u64) -> Result<Vec<u64>> {
    ensure!(len <= n, "sequence longer than the range");
    ensure!(*rank < falling_factorial(n, len), "rank out of range");
    let mut digits = vec![0u64; len as usize];
    let mut r = rank.clone();
    for i in (0..len).rev() {
        let radix = n - i;
        let d = &r % radix;
        digits[i as usize] = d.try_into().expect("digit below radix");
        r /= radix;
    }
    let mut free: Vec<u64> = (0..n).collect();
    Ok(digits.into_iter().map(|d| free.remove(d as usize)).collect())
}

/// Lexicographic rank of the strictly increasing `subset` of `[n]` among all
/// subsets of the same size.
pub fn rank_subset(subset: &[u64], n: u64) -> Result<BigUint> {
    let k = subset.len() as u64;
    ensure!(k <= n, "subset larger than the ground set");
    let mut rank = BigUint::zero();
    let mut next = 0u64;
    for (i, &c) in subset.iter().enumerate() {
        ensure!(c < n && c >= next, "subset must be increasing and inside [0, {n})");
        for v in next..c {
            rank += binomial(n - 1 - v, k - 1 - i as u64);
        }
        next = c + 1;
    }
    Ok(rank)
}

pub fn unrank_subset(rank: &BigUint, n: u64, k: u64) -> Result<Vec<u64>> {
    ensure!(*rank < binomial(n, k), "rank out of range");
    let mut r = rank.clone();
    let mut out = Vec::with_capacity(k as usize);
    let mut v = 0u64;
    for i in 0..k {
        loop {
            let block = binomial(n - 1 - v, k - 1 - i);
            if r < block {
                break;
            }
            r -= block;
            v += 1;
        }
        out.push(v);
        v += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(bits_for(&factorial(8)), 16);
        assert_eq!(bits_for(&BigUint::one()), 0);
        assert_eq!(bits_for(&BigUint::from(2u32)), 1);
        assert_eq!(binomial(10, 3), BigUint::from(120u32));
        assert_eq!(falling_factorial(8, 3), BigUint::from(336u32));
    }

    #[test]
    fn injection_ranks_are_lexicographic_bijection() {
        let mut seen = Vec::new();
        for r in 0..60u32 {
            let v = unrank_injection(&BigUint::from(r), 5, 3).unwrap();
            assert_eq!(rank_injection(&v, 5).unwrap(), BigUint::from(r));
            seen.push(v);
        }
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(seen, sorted);
        assert!(unrank_injection(&BigUint::from(60u32), 5, 3).is_err());
    }

    #[test]
    fn subset_ranks_are_lexicographic_bijection() {
        let mut prev: Option<Vec<u64>> = None;
        for r in 0..35u32 {
            let s = unrank_subset(&BigUint::from(r), 7, 3).unwrap();
            assert_eq!(rank_subset(&s, 7).unwrap(), BigUint::from(r));
            if let Some(p) = prev {
                assert!(p < s);
            }
            prev = Some(s);
        }
        assert_eq!(unrank_subset(&BigUint::zero(), 4, 0).unwrap(), Vec::<u64>::new());
    }
}
