use super::{decode_flagged, encode_flagged, map_input, Direction, OraclePath, QueryMeter, QueryOracle};
use crate::error::{ensure, Result};
use crate::sim::StateVector;

/// Oracle pair for `pi ∘ swap_{0,j}`, built from an oracle for `pi` with
/// inverse punctured at `y`. The puncture point is unchanged.
///
/// Bit positions are counted from the most significant bit: position 0 is
/// the first bit, position `j` is the `j`-th bit after it, so `swap_{0,j}`
/// moves bit `j` into the first-bit slot and `swap_{0,0}` is the identity.
///
/// Forward queries conjugate the input register, `(swap ⊗ I) O_pi (swap ⊗ I)`.
/// Inverse queries conjugate the value part of the output register,
/// `(I ⊗ swap) O (I ⊗ swap)`, which keeps the map an XOR oracle for
/// `swap ∘ pi^-1` on every output-register value. One base query per query.
pub struct SwapConjugatedOracle<'a> {
    base: &'a mut dyn QueryOracle,
    j: usize,
    path: OraclePath,
    meter: QueryMeter,
}

/// `swap_{0,j}` on an `n_bits` value, positions counted from the MSB.
pub fn swap_first_with(x: u64, j: usize, n_bits: usize) -> u64 {
    let (a, b) = (n_bits - 1, n_bits - 1 - j);
    let (ba, bb) = ((x >> a) & 1, (x >> b) & 1);
    if ba == bb {
        x
    } else {
        x ^ (1 << a) ^ (1 << b)
    }
}

fn swap_flagged(v: u64, j: usize, n_bits: usize) -> u64 {
    let (w, b) = decode_flagged(v);
    encode_flagged(swap_first_with(w, j, n_bits), b)
}

impl<'a> SwapConjugatedOracle<'a> {
    pub fn new(base: &'a mut dyn QueryOracle, j: usize, path: OraclePath) -> Result<Self> {
        let n = base.n_bits();
        ensure!(j < n, "bit position {j} out of range for {n} bits");
        Ok(Self {
            base,
            j,
            path,
            meter: QueryMeter::new(None),
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.meter.set_budget(Some(budget));
        self
    }

    pub fn position(&self) -> usize {
        self.j
    }
}

impl QueryOracle for SwapConjugatedOracle<'_> {
    fn n_bits(&self) -> usize {
        self.base.n_bits()
    }

    fn forward_value(&self, w: u64) -> u64 {
        self.base
            .forward_value(swap_first_with(w, self.j, self.n_bits()))
    }

    fn inverse_value(&self, w_flag: u64) -> u64 {
        swap_flagged(self.base.inverse_value(w_flag), self.j, self.n_bits())
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
        let n = self.n_bits();
        match direction {
            Direction::Forward => {
                let mapped = map_input(input, |v| swap_first_with(v, self.j, n));
                self.base.charge(direction, &mapped)
            }
            Direction::Inverse => self.base.charge(direction, input),
        }
    }

    fn apply_circuit(
        &mut self,
        direction: Direction,
        state: &mut StateVector,
        in_reg: &str,
        out_reg: &str,
    ) -> Result<()> {
        let n = self.n_bits();
        // positions from the LSB of the register being conjugated
        let (a, b) = (n - 1, n - 1 - self.j);
        match direction {
            Direction::Forward => {
                state.apply_swap_bits(in_reg, a, b)?;
                self.base.forward_query(state, in_reg, out_reg)?;
                state.apply_swap_bits(in_reg, a, b)
            }
            Direction::Inverse => {
                state.apply_swap_bits(out_reg, a + 1, b + 1)?;
                self.base.inverse_query(state, in_reg, out_reg)?;
                state.apply_swap_bits(out_reg, a + 1, b + 1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{make_two_sided, reject_element, Permutation};
    use crate::sim::RegisterLayout;

    #[test]
    fn swap_zero_zero_is_identity() {
        for x in 0..16 {
            assert_eq!(swap_first_with(x, 0, 4), x);
        }
        // 1000 <-> 0001 under swap_{0,3}
        assert_eq!(swap_first_with(0b1000, 3, 4), 0b0001);
        assert_eq!(swap_first_with(0b0100, 1, 4), 0b1000);
    }

    #[test]
    fn position_zero_matches_base_on_all_inputs() {
        let p = Permutation::from_seed(3, 9);
        let mut base = make_two_sided(p, 2).unwrap();
        let reference = base.clone();
        let s = SwapConjugatedOracle::new(&mut base, 0, OraclePath::Circuit).unwrap();
        for w in 0..8 {
            assert_eq!(s.forward_value(w), reference.forward_value(w));
        }
        for v in 0..16 {
            assert_eq!(s.inverse_value(v), reference.inverse_value(v));
        }
    }

    #[test]
    fn first_bit_of_preimage_is_bit_j() {
        let n = 4;
        let p = Permutation::from_seed(n, 1);
        for j in 0..n {
            let mut base = make_two_sided(p.clone(), 0).unwrap();
            let s = SwapConjugatedOracle::new(&mut base, j, OraclePath::Functional).unwrap();
            for x in 0..16u64 {
                let y = p.apply(x);
                // (pi ∘ swap)^-1 (y) = swap(x)
                let pre = s.inverse_value(encode_flagged(y, 0));
                if y != 0 {
                    let first = (pre >> n) & 1;
                    assert_eq!(first, (x >> (n - 1 - j)) & 1);
                } else {
                    assert_eq!(pre, reject_element(n));
                }
            }
        }
    }

    #[test]
    fn circuit_equals_functional_on_superposed_output_register() {
        let n = 3;
        let p = Permutation::from_seed(n, 77);
        for j in 0..n {
            for path in [OraclePath::Functional, OraclePath::Circuit] {
                let mut base = make_two_sided(p.clone(), 5).unwrap();
                let mut s = SwapConjugatedOracle::new(&mut base, j, path).unwrap();
                let l = RegisterLayout::packed(&[("w", n + 1), ("z", n + 1)]).unwrap();
                let mut st = StateVector::zero(l);
                st.apply_hadamard("w").unwrap();
                st.apply_hadamard("z").unwrap();
                st.apply_phase_where("z", num_complex::Complex64::new(0.0, 1.0), |z| z % 3 == 1)
                    .unwrap();
                let mut want = st.clone();
                s.inverse_query(&mut st, "w", "z").unwrap();
                s.apply_table(Direction::Inverse, &mut want, "w", "z").unwrap();
                assert!(st.max_deviation(&want).unwrap() < 1e-12);
                drop(s);
                assert_eq!(base.query_count(), 1);
            }
        }
    }

    #[test]
    fn rejects_out_of_range_position() {
        let mut base = make_two_sided(Permutation::identity(2), 0).unwrap();
        assert!(SwapConjugatedOracle::new(&mut base, 2, OraclePath::Functional).is_err());
    }
}
