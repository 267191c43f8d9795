//! Oracles for two-sided permutation inversion.
//!
//! Every oracle implements [`QueryOracle`]: a forward function on `n` bits and
//! an inverse function on `n + 1` bits (value with a flag bit in the least
//! significant position), each applied as an XOR oracle to a
//! [`StateVector`]. Derived oracles hold a mutable borrow of the oracle they
//! are built from and charge it for every logical query, so query budgets and
//! magnitude probes compose through any nesting.
//!
//! Derived oracles support two realizations selected by [`OraclePath`]:
//! the functional path applies the composed function table directly and
//! charges the underlying oracle as if the circuit had run; the circuit path
//! runs the reversible aux-register construction gate by gate, issuing real
//! queries to the underlying oracle.

mod conjugated;
mod handle;
pub mod matrix;
mod meter;
mod permutation;
mod qrac_decode;
mod swap;
mod unique_search;

pub use conjugated::{compose_conjugated, ConjugatedOracle};
pub use handle::{make_two_sided, MergedOracleFunction, OracleHandle, PuncturedInverse};
pub use meter::{Direction, MagnitudeProbe, ProbeId, QueryMeter};
pub use permutation::{first_bit, Permutation};
pub use qrac_decode::{build_qrac_decode_oracle, QracDecodeHandle, QracDecodeOracle};
pub use swap::{swap_first_with, SwapConjugatedOracle};
pub use unique_search::{
    build_unique_search_oracles, FunctionOracle, UniqueSearchEmbedding, UniqueSearchOracle,
};

use crate::error::{ensure, Result};
use crate::sim::StateVector;

/// How a derived oracle realizes a query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OraclePath {
    #[default]
    Functional,
    Circuit,
}

/// Encodes `(w, b)` in `[N] x {0,1}` as `w << 1 | b`.
#[inline]
pub fn encode_flagged(w: u64, b: u64) -> u64 {
    (w << 1) | (b & 1)
}

#[inline]
pub fn decode_flagged(v: u64) -> (u64, u64) {
    (v >> 1, v & 1)
}

/// The reject element `1^n || 1`, i.e. `(N - 1, 1)`.
#[inline]
pub fn reject_element(n_bits: usize) -> u64 {
    (1u64 << (n_bits + 1)) - 1
}

/// Sparse marginal distribution of `reg`: the query-input description used by
/// meters.
pub fn query_input(state: &StateVector, reg: &str) -> Result<Vec<(u64, f64)>> {
    Ok(state
        .outcome_distribution(reg)?
        .into_iter()
        .enumerate()
        .filter(|(_, p)| *p > 0.0)
        .map(|(v, p)| (v as u64, p))
        .collect())
}

pub(crate) fn aux_name(state: &StateVector, tag: &str) -> String {
    format!("{tag}@{}", state.num_qubits())
}

/// An instrumented two-sided oracle.
pub trait QueryOracle {
    fn n_bits(&self) -> usize;

    /// The forward function on `[N]`, evaluated without charging a query.
    fn forward_value(&self, w: u64) -> u64;

    /// The inverse function on `[N] x {0,1}` (flag in the low bit), evaluated
    /// without charging a query.
    fn inverse_value(&self, w_flag: u64) -> u64;

    fn meter(&self) -> &QueryMeter;
    fn meter_mut(&mut self) -> &mut QueryMeter;

    fn path(&self) -> OraclePath {
        OraclePath::Functional
    }

    /// Charges whatever underlying oracles one logical query consumes, given
    /// the logical query input distribution. Used by the functional path and
    /// by classical queries.
    fn charge_children(&mut self, _direction: Direction, _input: &[(u64, f64)]) -> Result<()> {
        Ok(())
    }

    /// Circuit realization of one query. The meter of `self` has already
    /// been charged. Oracles without a circuit fall back to the table.
    fn apply_circuit(
        &mut self,
        direction: Direction,
        state: &mut StateVector,
        in_reg: &str,
        out_reg: &str,
    ) -> Result<()> {
        let input = query_input(state, in_reg)?;
        self.charge_children(direction, &input)?;
        self.apply_table(direction, state, in_reg, out_reg)
    }

    /// XORs the function table into `out_reg` with no accounting.
    fn apply_table(
        &self,
        direction: Direction,
        state: &mut StateVector,
        in_reg: &str,
        out_reg: &str,
    ) -> Result<()> {
        match direction {
            Direction::Forward => state.apply_xor_fn(in_reg, out_reg, |w| self.forward_value(w)),
            Direction::Inverse => state.apply_xor_fn(in_reg, out_reg, |w| self.inverse_value(w)),
        }
    }

    /// Charges one logical query (own meter, then underlying oracles).
    fn charge(&mut self, direction: Direction, input: &[(u64, f64)]) -> Result<()> {
        self.meter_mut().record(direction, input)?;
        self.charge_children(direction, input)
    }

    /// `|w>|z> -> |w>|z xor f(w)>` on registers of width `n`.
    fn forward_query(&mut self, state: &mut StateVector, w_reg: &str, z_reg: &str) -> Result<()> {
        self.query(Direction::Forward, state, w_reg, z_reg)
    }

    /// `|w,b>|z,c> -> |w,b>|(z,c) xor f^-1(w,b)>` on registers of width `n + 1`.
    fn inverse_query(
        &mut self,
        state: &mut StateVector,
        w_flag_reg: &str,
        z_flag_reg: &str,
    ) -> Result<()> {
        self.query(Direction::Inverse, state, w_flag_reg, z_flag_reg)
    }

    fn query(
        &mut self,
        direction: Direction,
        state: &mut StateVector,
        in_reg: &str,
        out_reg: &str,
    ) -> Result<()> {
        let width = match direction {
            Direction::Forward => self.n_bits(),
            Direction::Inverse => self.n_bits() + 1,
        };
        let (i, o) = (state.register(in_reg)?, state.register(out_reg)?);
        ensure!(
            i.width == width && o.width == width,
            "{direction:?} query needs {width}-bit registers, got {} and {}",
            i.width,
            o.width
        );
        ensure!(in_reg != out_reg, "query input and output are the same register");
        let input = query_input(state, in_reg)?;
        self.meter_mut().record(direction, &input)?;
        match self.path() {
            OraclePath::Functional => {
                self.charge_children(direction, &input)?;
                self.apply_table(direction, state, in_reg, out_reg)
            }
            OraclePath::Circuit => self.apply_circuit(direction, state, in_reg, out_reg),
        }
    }

    /// A query on a computational-basis input, returning the answer.
    fn forward_classical(&mut self, w: u64) -> Result<u64> {
        ensure!(w < 1u64 << self.n_bits(), "query input {w} out of range");
        self.charge(Direction::Forward, &[(w, 1.0)])?;
        Ok(self.forward_value(w))
    }

    fn inverse_classical(&mut self, w_flag: u64) -> Result<u64> {
        ensure!(w_flag < 2u64 << self.n_bits(), "query input {w_flag} out of range");
        self.charge(Direction::Inverse, &[(w_flag, 1.0)])?;
        Ok(self.inverse_value(w_flag))
    }

    fn query_count(&self) -> u64 {
        self.meter().count()
    }

    fn total_query_magnitude(&self, probe: ProbeId) -> Result<f64> {
        self.meter().total_query_magnitude(probe)
    }

    fn add_probe(&mut self, direction: Direction, subset: &[u64]) -> Result<ProbeId> {
        let domain = match direction {
            Direction::Forward => 1u64 << self.n_bits(),
            Direction::Inverse => 2u64 << self.n_bits(),
        };
        self.meter_mut().add_probe(direction, subset, domain)
    }
}

/// Applies `map` to every input of a query-input distribution.
pub fn map_input(input: &[(u64, f64)], map: impl Fn(u64) -> u64) -> Vec<(u64, f64)> {
    input.iter().map(|&(v, p)| (map(v), p)).collect()
}

/// The select construction shared by the unique-search and decoding oracles:
/// with aux registers `g, not g, fallback(w), constant`, XOR
/// `g(w) ? constant : fallback(w)` into `out_reg`, then uncompute.
/// `indicator` XORs `g(w)` into its 1-bit target and is called twice.
pub(crate) fn select_circuit(
    state: &mut StateVector,
    in_reg: &str,
    out_reg: &str,
    width: usize,
    mut indicator: impl FnMut(&mut StateVector, &str, &str) -> Result<()>,
    fallback: impl Fn(u64) -> u64,
    constant: u64,
) -> Result<()> {
    let mut names = Vec::with_capacity(4);
    for (tag, w) in [("sel.g", 1), ("sel.ng", 1), ("sel.fb", width), ("sel.c", width)] {
        let name = aux_name(state, tag);
        state.extend(&name, w)?;
        names.push(name);
    }
    let (g, ng, fb, c) = (&names[0], &names[1], &names[2], &names[3]);

    indicator(state, in_reg, g)?;
    state.apply_xor_fn(g, ng, |v| v)?;
    state.apply_not(ng)?;
    state.apply_xor_fn(in_reg, fb, &fallback)?;
    state.apply_xor_fn(in_reg, c, |_| constant)?;

    state.apply_xor_multi(&[g, c], out_reg, |v| if v[0] == 1 { v[1] } else { 0 })?;
    state.apply_xor_multi(&[ng, fb], out_reg, |v| if v[0] == 1 { v[1] } else { 0 })?;

    state.apply_xor_fn(in_reg, c, |_| constant)?;
    state.apply_xor_fn(in_reg, fb, &fallback)?;
    state.apply_not(ng)?;
    state.apply_xor_fn(g, ng, |v| v)?;
    indicator(state, in_reg, g)?;

    for name in names.iter().rev() {
        state.discard_clean(name)?;
    }
    Ok(())
}
