use super::handle::inverse_with_puncture;
use super::{
    first_bit, map_input, query_input, select_circuit, Direction, OraclePath, Permutation,
    QueryMeter, QueryOracle,
};
use crate::error::{ensure, Result};
use crate::sim::{ClassicalFunctionTable, StateVector};

/// A metered oracle for a Boolean function `f`.
#[derive(Clone, Debug)]
pub struct FunctionOracle {
    f: ClassicalFunctionTable,
    meter: QueryMeter,
}

impl FunctionOracle {
    pub fn new(f: ClassicalFunctionTable) -> Result<Self> {
        ensure!(f.codomain_bits() == 1, "expected a Boolean function");
        Ok(Self {
            f,
            meter: QueryMeter::new(None),
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.meter.set_budget(Some(budget));
        self
    }

    pub fn function(&self) -> &ClassicalFunctionTable {
        &self.f
    }

    pub fn eval(&self, j: u64) -> u64 {
        self.f.eval(j)
    }

    pub fn meter(&self) -> &QueryMeter {
        &self.meter
    }

    pub fn query_count(&self) -> u64 {
        self.meter.count()
    }

    /// Records one query on inputs distributed as `input`.
    pub fn charge(&mut self, input: &[(u64, f64)]) -> Result<()> {
        self.meter.record(Direction::Forward, input)
    }

    /// `|j>|b> -> |j>|b xor f(j)>`.
    pub fn query(&mut self, state: &mut StateVector, in_reg: &str, out_reg: &str) -> Result<()> {
        let input = query_input(state, in_reg)?;
        self.charge(&input)?;
        state.apply_xor_oracle(&self.f, in_reg, out_reg)
    }
}

/// The data of the unique-search embedding: an instance `f` on
/// `n - m - 1` bits planted into `pi` at image `t` with suffix `mu`.
///
/// Inputs of `h` are read as `i || j || u` with `i` the most significant bit,
/// `j` the next `n - m - 1` bits and `u` the low `m` bits. `case_bit` is the
/// first bit of `pi^-1(t)`; the planted collision sits on the other half.
#[derive(Clone, Debug)]
pub struct UniqueSearchEmbedding {
    pub f: ClassicalFunctionTable,
    pub perm: Permutation,
    pub target: u64,
    pub suffix: u64,
    pub adaptive_bits: usize,
    pub case_bit: u64,
}

impl UniqueSearchEmbedding {
    pub fn validate(&self) -> Result<()> {
        let n = self.perm.n_bits();
        let m = self.adaptive_bits;
        ensure!(m < n, "adaptive bits {m} must be below n = {n}");
        ensure!(
            self.f.domain_bits() == n - m - 1 && self.f.codomain_bits() == 1,
            "f must map {} bits to one bit",
            n - m - 1
        );
        let marked = self.f.table().iter().filter(|&&v| v == 1).count();
        ensure!(marked <= 1, "f marks {marked} elements, at most one allowed");
        ensure!(self.target < self.perm.size(), "target {} out of range", self.target);
        ensure!(self.suffix < 1u64 << m, "suffix {} does not fit {m} bits", self.suffix);
        let pre = self.perm.invert(self.target);
        ensure!(
            pre & ((1u64 << m) - 1) == self.suffix,
            "pi^-1(t) does not end in the suffix"
        );
        ensure!(
            first_bit(pre, n) == self.case_bit,
            "case bit disagrees with the first bit of pi^-1(t)"
        );
        Ok(())
    }

    fn j_part(&self, x: u64) -> u64 {
        let n = self.perm.n_bits();
        let width = n - self.adaptive_bits - 1;
        (x >> self.adaptive_bits) & ((1u64 << width) - 1)
    }

    /// `g(x) = [i = 1 - case_bit] * f(j) * [u = mu]`.
    fn marks(&self, f: &ClassicalFunctionTable, x: u64) -> u64 {
        let n = self.perm.n_bits();
        let u = x & ((1u64 << self.adaptive_bits) - 1);
        let hit = first_bit(x, n) != self.case_bit && u == self.suffix && f.eval(self.j_part(x)) == 1;
        hit as u64
    }

    /// `h_{f,pi,t,mu}` evaluated directly.
    pub fn h(&self, x: u64) -> u64 {
        if self.marks(&self.f, x) == 1 {
            self.target
        } else {
            self.perm.apply(x)
        }
    }
}

/// The oracle pair `O_h`, `O_{h^-1*} = O_{pi^-1_{⊥t}}` handed to a decision
/// inverter. Each forward query costs two queries to the metered `f`
/// (compute and uncompute of the indicator); inverse queries cost none.
pub struct UniqueSearchOracle {
    emb: UniqueSearchEmbedding,
    f_oracle: FunctionOracle,
    path: OraclePath,
    meter: QueryMeter,
}

pub fn build_unique_search_oracles(
    emb: UniqueSearchEmbedding,
    path: OraclePath,
) -> Result<UniqueSearchOracle> {
    emb.validate()?;
    let f_oracle = FunctionOracle::new(emb.f.clone())?;
    Ok(UniqueSearchOracle {
        emb,
        f_oracle,
        path,
        meter: QueryMeter::new(None),
    })
}

impl UniqueSearchOracle {
    pub fn with_budget(mut self, budget: u64) -> Self {
        self.meter.set_budget(Some(budget));
        self
    }

    pub fn embedding(&self) -> &UniqueSearchEmbedding {
        &self.emb
    }

    /// The metered oracle for `f`.
    pub fn f_oracle(&self) -> &FunctionOracle {
        &self.f_oracle
    }
}

impl QueryOracle for UniqueSearchOracle {
    fn n_bits(&self) -> usize {
        self.emb.perm.n_bits()
    }

    fn forward_value(&self, w: u64) -> u64 {
        self.emb.h(w)
    }

    fn inverse_value(&self, w_flag: u64) -> u64 {
        inverse_with_puncture(&self.emb.perm, Some(self.emb.target), w_flag)
    }

    fn meter(&self) -> &QueryMeter {
        &self.meter
    }

    fn meter_mut(&mut self) -> &mut QueryMeter {
        &mut self.meter
    }

    fn path(&self) -> OraclePath {
        self.path
    }

    fn charge_children(&mut self, direction: Direction, input: &[(u64, f64)]) -> Result<()> {
        if direction == Direction::Inverse {
            return Ok(());
        }
        let mapped = map_input(input, |x| self.emb.j_part(x));
        self.f_oracle.charge(&mapped)?;
        self.f_oracle.charge(&mapped)
    }

    fn apply_circuit(
        &mut self,
        direction: Direction,
        state: &mut StateVector,
        in_reg: &str,
        out_reg: &str,
    ) -> Result<()> {
        if direction == Direction::Inverse {
            return self.apply_table(direction, state, in_reg, out_reg);
        }
        let n = self.n_bits();
        let Self { emb, f_oracle, .. } = self;
        let emb = &*emb;
        // g is computed with one controlled query to O_f on the j bits,
        // controlled on i and u (a controlled XOR oracle costs one query).
        let indicator = |s: &mut StateVector, w: &str, g: &str| -> Result<()> {
            let input = map_input(&query_input(s, w)?, |x| emb.j_part(x));
            f_oracle.charge(&input)?;
            let f = f_oracle.function();
            s.apply_xor_fn(w, g, |x| emb.marks(f, x))
        };
        select_circuit(
            state,
            in_reg,
            out_reg,
            n,
            indicator,
            |x| emb.perm.apply(x),
            emb.target,
        )
    }
}
