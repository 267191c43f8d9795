//! Seeded randomness.
//!
//! Every random choice in the crate is drawn from a [`Coins`] stream, which is a
//! ChaCha8 generator keyed by a 64-bit seed. Independent substreams are derived
//! with [`derive_seed`], a SplitMix64-style mixer over `(seed, index)`, so a run
//! is fully determined by its root seed no matter how trials are scheduled.
//!
//! Bounded integers use rejection sampling on raw `u64` output instead of the
//! `rand` distribution machinery, which keeps sampled permutations bit-exact
//! across platforms and dependency upgrades.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of substream `index` under `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(mix64(seed).wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

/// A deterministic stream of random bits.
#[derive(Clone, Debug)]
pub struct Coins {
    rng: ChaCha8Rng,
}

impl Coins {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform integer in `[0, bound)`. Panics on `bound == 0`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        if bound.is_power_of_two() {
            return self.next_u64() & (bound - 1);
        }
        // largest multiple of `bound` representable, exclusive
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }

    /// Uniform real in `[0, 1)` with 53 bits of precision.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    pub fn bit(&mut self) -> u64 {
        self.next_u64() >> 63
    }
}

/// The shared random string `r` handed to both phases of an inverter.
///
/// It is a seed rather than a materialized bit string: each consumer opens the
/// substream it needs, so "parse r into 2l substrings" becomes
/// `r.substream(i)` for `i` in `0..2l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct SharedRandomness(pub u64);

impl SharedRandomness {
    pub fn substream(self, index: u64) -> SharedRandomness {
        SharedRandomness(derive_seed(self.0, index))
    }

    pub fn coins(self) -> Coins {
        Coins::from_seed(self.0)
    }
}
