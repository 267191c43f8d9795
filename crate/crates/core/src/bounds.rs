//! Tail bounds and the swapping-lemma checker.
//!
//! Every bound is returned as a [`TailBound`] holding both the raw formula
//! value and the value clamped to `[0, 1]`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::rng::Coins;
use crate::sim::{ClassicalFunctionTable, RegisterLayout, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `Pr[X < (1 - delta) mu] <= 2 exp(-delta^2 mu / 2)`.
    Chernoff,
    /// `Pr[X <= n/2] <= exp(-n (p - 1/2)^2 / (2p))` for `p > 1/2`.
    ChernoffMajority,
    /// `Pr[X >= theta] >= (E[X] - theta) / (1 - theta)`, a lower bound.
    ReverseMarkov,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub kind: BoundKind,
    pub parameters: BTreeMap<String, f64>,
    /// The formula before clamping.
    pub raw: f64,
    pub bound_value: f64,
}

impl TailBound {
    fn new(kind: BoundKind, parameters: &[(&str, f64)], raw: f64) -> Self {
        Self {
            kind,
            parameters: parameters.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            raw,
            bound_value: raw.clamp(0.0, 1.0),
        }
    }
}

/// Upper bound on `Pr[X < (1 - delta) n p]` for `X ~ Bin(n, p)`.
pub fn chernoff_lower_tail(n: u64, p: f64, delta: f64) -> Result<TailBound> {
    ensure!(p > 0.0 && p < 1.0, "p = {p} outside (0, 1)");
    ensure!(delta > 0.0 && delta < 1.0, "delta = {delta} outside (0, 1)");
    let mu = n as f64 * p;
    let raw = 2.0 * (-delta * delta * mu / 2.0).exp();
    Ok(TailBound::new(
        BoundKind::Chernoff,
        &[("n", n as f64), ("p", p), ("delta", delta)],
        raw,
    ))
}

/// Upper bound on the probability that a majority of `n` independent
/// trials, each correct with probability `p > 1/2`, fails (`X <= n/2`).
pub fn chernoff_majority(n: u64, p: f64) -> Result<TailBound> {
    ensure!(p > 0.5 && p < 1.0, "p = {p} outside (1/2, 1)");
    let raw = (-(n as f64) * (p - 0.5).powi(2) / (2.0 * p)).exp();
    Ok(TailBound::new(
        BoundKind::ChernoffMajority,
        &[("n", n as f64), ("p", p)],
        raw,
    ))
}

/// Lower bound on `Pr[X >= theta]` for `X` in `[0, 1]` with the given mean.
pub fn reverse_markov(expectation: f64, theta: f64) -> Result<TailBound> {
    ensure!(
        (0.0..=1.0).contains(&expectation),
        "expectation {expectation} outside [0, 1]"
    );
    ensure!(theta > 0.0 && theta < 1.0, "theta = {theta} outside (0, 1)");
    let raw = ((expectation - theta) / (1.0 - theta)).max(0.0);
    Ok(TailBound::new(
        BoundKind::ReverseMarkov,
        &[("expectation", expectation), ("theta", theta)],
        raw,
    ))
}

/// `{x : p_x >= theta * epsilon}` for a table with mean at least `epsilon`.
/// The result has at least `(1 - theta) epsilon |X|` elements; this is
/// checked before returning.
pub fn averaging_subset(success_table: &[f64], epsilon: f64, theta: f64) -> Result<Vec<u64>> {
    ensure!(!success_table.is_empty(), "empty success table");
    ensure!(
        success_table.iter().all(|p| (0.0..=1.0).contains(p)),
        "success table entries must lie in [0, 1]"
    );
    ensure!((0.0..=1.0).contains(&theta), "theta = {theta} outside [0, 1]");
    let size = success_table.len() as f64;
    let mean = success_table.iter().sum::<f64>() / size;
    ensure!(
        mean >= epsilon - 1e-12,
        "table mean {mean} is below epsilon {epsilon}"
    );
    let subset: Vec<u64> = (0..success_table.len() as u64)
        .filter(|&x| success_table[x as usize] >= theta * epsilon)
        .collect();
    ensure!(
        subset.len() as f64 >= (1.0 - theta) * epsilon * size - 1e-9,
        "averaging subset of size {} is below the guarantee",
        subset.len()
    );
    Ok(subset)
}

/// Registers of a [`QueryCircuit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitReg {
    /// Query input.
    X,
    /// Query output.
    Z,
    /// One work qubit.
    W,
}

impl CircuitReg {
    fn name(self) -> &'static str {
        match self {
            CircuitReg::X => "x",
            CircuitReg::Z => "z",
            CircuitReg::W => "w",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    Query,
    Hadamard(CircuitReg),
    SwapBits { reg: CircuitReg, a: usize, b: usize },
    XorConst { reg: CircuitReg, k: u64 },
    /// `w ^= bit of x`.
    CopyBit { bit: usize },
    /// Phase `e^{i angle}` on basis states with `reg == value`.
    Phase { reg: CircuitReg, value: u64, angle: f64 },
}

/// A query algorithm: a fixed gate list starting from the all-zero state
/// on `x (n) | z (m) | w (1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryCircuit {
    pub input_bits: usize,
    pub output_bits: usize,
    pub gates: Vec<Gate>,
}

impl QueryCircuit {
    pub fn queries(&self) -> u64 {
        self.gates.iter().filter(|g| **g == Gate::Query).count() as u64
    }

    fn width(&self, reg: CircuitReg) -> usize {
        match reg {
            CircuitReg::X => self.input_bits,
            CircuitReg::Z => self.output_bits,
            CircuitReg::W => 1,
        }
    }

    /// A seeded random circuit with `queries` oracle calls interleaved with
    /// `1..=3` random gates between consecutive calls.
    pub fn random(input_bits: usize, output_bits: usize, queries: u64, coins: &mut Coins) -> Self {
        let mut c = Self {
            input_bits,
            output_bits,
            gates: vec![Gate::Hadamard(CircuitReg::X)],
        };
        for _ in 0..queries {
            c.gates.push(Gate::Query);
            for _ in 0..1 + coins.below(3) {
                let g = c.random_gate(coins);
                c.gates.push(g);
            }
        }
        c
    }

    fn random_gate(&self, coins: &mut Coins) -> Gate {
        let regs = [CircuitReg::X, CircuitReg::Z, CircuitReg::W];
        let reg = regs[coins.below(3) as usize];
        let w = self.width(reg);
        match coins.below(5) {
            0 => Gate::Hadamard(reg),
            1 if w >= 2 => Gate::SwapBits {
                reg,
                a: coins.below(w as u64) as usize,
                b: coins.below(w as u64) as usize,
            },
            2 => Gate::CopyBit {
                bit: coins.below(self.input_bits as u64) as usize,
            },
            3 => Gate::Phase {
                reg,
                value: coins.below(1 << w),
                angle: coins.unit() * std::f64::consts::TAU,
            },
            _ => Gate::XorConst {
                reg,
                k: coins.below(1 << w),
            },
        }
    }

    /// Runs the circuit against the XOR oracle for `f`; returns the final
    /// state and `||Pi_S psi_t||^2` before each query.
    pub fn run(&self, f: &ClassicalFunctionTable, subset: &[u64]) -> Result<(StateVector, Vec<f64>)> {
        ensure!(
            f.domain_bits() == self.input_bits && f.codomain_bits() == self.output_bits,
            "oracle shape does not match the circuit"
        );
        let layout = RegisterLayout::packed(&[("x", self.input_bits), ("z", self.output_bits), ("w", 1)])?;
        let mut s = StateVector::zero(layout);
        let mut mags = Vec::new();
        for g in &self.gates {
            match g {
                Gate::Query => {
                    mags.push(s.projector_mass("x", subset)?);
                    s.apply_xor_oracle(f, "x", "z")?;
                }
                Gate::Hadamard(r) => s.apply_hadamard(r.name())?,
                Gate::SwapBits { reg, a, b } => {
                    if a != b {
                        s.apply_swap_bits(reg.name(), *a, *b)?
                    }
                }
                Gate::XorConst { reg, k } => {
                    let r = s.register(reg.name())?;
                    s.permute_basis(|i| r.write(i, r.read(i) ^ k))
                }
                Gate::CopyBit { bit } => {
                    let bit = *bit;
                    s.apply_xor_fn("x", "w", move |v| (v >> bit) & 1)?
                }
                Gate::Phase { reg, value, angle } => {
                    let v = *value;
                    s.apply_phase_where(reg.name(), Complex64::from_polar(1.0, *angle), move |x| x == v)?
                }
            }
        }
        Ok((s, mags))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwappingReport {
    pub distance: f64,
    /// `q(A^f, S)`.
    pub magnitude: f64,
    pub queries: u64,
    /// `sqrt(T q)`.
    pub bound: f64,
    pub holds: bool,
    /// `2 sqrt(T q)`, the bound the hybrid argument gives for XOR oracles.
    pub hybrid_bound: f64,
    pub holds_hybrid: bool,
}

impl SwappingReport {
    /// `distance / bound`, or 0 when both vanish.
    pub fn tightness(&self) -> f64 {
        if self.bound > 0.0 {
            self.distance / self.bound
        } else if self.distance > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }
}

/// Runs `algorithm` against `f` (measuring the query magnitude on the set
/// where `f` and `g` differ) and against `g`, and compares the final states.
/// `t` is the declared query bound and must cover the circuit's queries.
pub fn swapping_check(
    algorithm: &QueryCircuit,
    f: &ClassicalFunctionTable,
    g: &ClassicalFunctionTable,
    t: u64,
) -> Result<SwappingReport> {
    ensure!(algorithm.queries() <= t, "circuit makes more than {t} queries");
    let subset = f.differing_inputs(g)?;
    let (sf, mags) = algorithm.run(f, &subset)?;
    let (sg, _) = algorithm.run(g, &subset)?;
    let distance = sf.euclidean_distance(&sg)?;
    let magnitude: f64 = mags.iter().sum();
    let bound = (t as f64 * magnitude).sqrt();
    let tol = 1e-10;
    Ok(SwappingReport {
        distance,
        magnitude,
        queries: t,
        bound,
        holds: distance <= bound + tol,
        hybrid_bound: 2.0 * bound,
        holds_hybrid: distance <= 2.0 * bound + tol,
    })
}

/// A seeded random `(algorithm, f, g)` triple: `f` uniform, `g` equal to `f`
/// outside a random non-empty set `S` and different from it on `S`.
pub fn random_swapping_instance(
    input_bits: usize,
    queries: u64,
    seed: u64,
) -> Result<(QueryCircuit, ClassicalFunctionTable, ClassicalFunctionTable)> {
    ensure!(input_bits >= 1, "need at least one input bit");
    let mut coins = Coins::from_seed(seed);
    let n = 1u64 << input_bits;
    let f: Vec<u64> = (0..n).map(|_| coins.below(n)).collect();
    let s_size = 1 + coins.below(n);
    let mut g = f.clone();
    let mut order: Vec<u64> = (0..n).collect();
    for i in 0..s_size as usize {
        let j = i + coins.below(n - i as u64) as usize;
        order.swap(i, j);
        let x = order[i] as usize;
        g[x] = (f[x] + 1 + coins.below(n - 1)) % n;
    }
    let circuit = QueryCircuit::random(input_bits, input_bits, queries, &mut coins);
    Ok((
        circuit,
        ClassicalFunctionTable::new(input_bits, input_bits, f)?,
        ClassicalFunctionTable::new(input_bits, input_bits, g)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chernoff_values_and_clamping() {
        let b = chernoff_lower_tail(10, 0.5, 1e-6).unwrap();
        assert!(b.raw > 1.99 && b.bound_value == 1.0);
        let m = chernoff_majority(200, 0.6).unwrap();
        assert!((m.bound_value - (-200.0f64 * 0.01 / 1.2).exp()).abs() < 1e-15);
        assert!((m.bound_value - 0.1889).abs() < 1e-4);
        assert!(chernoff_lower_tail(10, 1.0, 0.5).is_err());
        assert!(chernoff_majority(10, 0.5).is_err());
    }

    #[test]
    fn reverse_markov_endpoints() {
        assert_eq!(reverse_markov(0.3, 0.3).unwrap().bound_value, 0.0);
        assert_eq!(reverse_markov(1.0, 0.3).unwrap().bound_value, 1.0);
        assert!(reverse_markov(1.1, 0.3).is_err());
    }

    #[test]
    fn averaging_examples() {
        assert_eq!(averaging_subset(&[0.2; 6], 0.2, 0.5).unwrap().len(), 6);
        let t = [0.4, 0.4, 0.0, 0.0];
        assert_eq!(averaging_subset(&t, 0.2, 0.5).unwrap(), vec![0, 1]);
        assert!(averaging_subset(&t, 0.3, 0.5).is_err());
    }

    #[test]
    fn identical_oracles_give_zero_distance() {
        let (c, f, _) = random_swapping_instance(3, 4, 1).unwrap();
        let r = swapping_check(&c, &f, &f, 4).unwrap();
        assert_eq!(r.distance, 0.0);
        assert!(r.holds);
    }

    #[test]
    fn queries_outside_the_set_have_no_magnitude() {
        let f = ClassicalFunctionTable::from_fn(2, 2, |x| x).unwrap();
        let g = ClassicalFunctionTable::from_fn(2, 2, |x| if x == 3 { 0 } else { x }).unwrap();
        let c = QueryCircuit {
            input_bits: 2,
            output_bits: 2,
            gates: vec![Gate::XorConst { reg: CircuitReg::X, k: 1 }, Gate::Query, Gate::Query],
        };
        let r = swapping_check(&c, &f, &g, 2).unwrap();
        assert_eq!((r.distance, r.magnitude), (0.0, 0.0));
    }

    #[test]
    fn single_query_on_a_phase_state_needs_the_factor_two() {
        // |x=1>|z=->: f(1)=0 leaves it, g(1)=1 flips its sign
        let f = ClassicalFunctionTable::from_fn(1, 1, |_| 0).unwrap();
        let g = ClassicalFunctionTable::from_fn(1, 1, |x| x).unwrap();
        let c = QueryCircuit {
            input_bits: 1,
            output_bits: 1,
            gates: vec![
                Gate::XorConst { reg: CircuitReg::X, k: 1 },
                Gate::XorConst { reg: CircuitReg::Z, k: 1 },
                Gate::Hadamard(CircuitReg::Z),
                Gate::Query,
            ],
        };
        let r = swapping_check(&c, &f, &g, 1).unwrap();
        assert!((r.distance - 2.0).abs() < 1e-12);
        assert!((r.bound - 1.0).abs() < 1e-12);
        assert!(!r.holds && r.holds_hybrid);
    }
}
