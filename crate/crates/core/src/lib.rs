//! Query-model simulation of two-sided permutation inversion.
//!
//! The crate builds the objects that appear in the analysis of inverting a
//! random permutation when both `pi` and a punctured `pi^-1` are available as
//! quantum oracles:
//!
//! * [`sim`]: dense statevectors with XOR oracles, swaps and projector masses.
//! * [`oracle`]: permutations, the instrumented two-sided oracle pair and every
//!   derived oracle (conjugated, swap-conjugated, unique-search embedding,
//!   random-access-code decoding), each with an exact functional path and a
//!   reversible aux-register circuit path.
//! * [`inverter`]: the two-phase inverter abstraction, baseline inverters and
//!   the exact / sampled inversion experiments.
//! * [`amplify`]: repetition with verification (search) or majority vote
//!   (decision).
//! * [`reduce`]: search-from-decision and unique-search-from-decision.
//! * [`qrac`]: a variable-length random access code for permutations.
//! * [`bounds`]: tail bounds and the swapping-lemma checker.

pub mod amplify;
pub mod bounds;
pub mod error;
pub mod inverter;
pub mod oracle;
pub mod qrac;
pub mod reduce;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
