use num_complex::Complex64;

use super::{ClassicalFunctionTable, Register, RegisterLayout, BASIS_TOL, NORM_TOL};
use crate::error::{contract, ensure, Result};

/// Dense pure state over a named register layout.
///
/// All oracle and gate methods act in place. Basis-relabeling operations move
/// amplitudes without arithmetic, so they are exact.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zero basis state.
    pub fn zero(layout: RegisterLayout) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << layout.num_qubits()];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { layout, amps }
    }

    pub fn basis(layout: RegisterLayout, values: &[(&str, u64)]) -> Result<Self> {
        let idx = layout.index_of(values)?;
        let mut s = Self::zero(layout);
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[idx] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Wraps raw amplitudes; the vector must have the right length and unit norm.
    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self> {
        ensure!(
            amps.len() == 1usize << layout.num_qubits(),
            "{} amplitudes for {} qubits",
            amps.len(),
            layout.num_qubits()
        );
        let s = Self { layout, amps };
        let norm = s.norm();
        ensure!((norm - 1.0).abs() <= NORM_TOL, "state norm {norm} is not 1");
        Ok(s)
    }

    /// Normalized linear combination `sum_k c_k |s_k>` of states sharing a layout.
    pub fn superpose(terms: &[(Complex64, &StateVector)]) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            contract!("empty superposition");
        };
        let mut amps = vec![Complex64::new(0.0, 0.0); first.amps.len()];
        for (c, s) in terms {
            ensure!(s.layout == first.layout, "layouts differ");
            for (a, b) in amps.iter_mut().zip(&s.amps) {
                *a += c * b;
            }
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        ensure!(norm > 1e-12, "superposition vanishes");
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self {
            layout: first.layout.clone(),
            amps,
        })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.num_qubits()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, values: &[(&str, u64)]) -> Result<Complex64> {
        Ok(self.amps[self.layout.index_of(values)?])
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn register(&self, name: &str) -> Result<Register> {
        self.layout.get(name).cloned()
    }

    /// Applies a basis permutation `|i> -> |map(i)>`. `map` must be a bijection
    /// on basis indices.
    pub fn permute_basis(&mut self, map: impl Fn(usize) -> usize) {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            out[map(i)] = *a;
        }
        debug_assert!((out.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-6);
        self.amps = out;
    }

    /// Applies an involutive basis permutation in place by pairwise swaps.
    ///
    /// Only pairs with some nonzero amplitude are visited. Each pair is
    /// swapped once: from its smaller index if both were nonzero, else from
    /// the nonzero one.
    fn swap_pairs(&mut self, partner: impl Fn(usize) -> usize) {
        let zero = Complex64::new(0.0, 0.0);
        let support: Vec<usize> = (0..self.amps.len()).filter(|&i| self.amps[i] != zero).collect();
        for i in support {
            let j = partner(i);
            if j > i || (j < i && self.amps[j] == zero) {
                self.amps.swap(i, j);
            }
        }
    }

    fn oracle_registers(&self, in_reg: &str, out_reg: &str) -> Result<(Register, Register)> {
        ensure!(in_reg != out_reg, "oracle input and output are both {in_reg}");
        Ok((self.register(in_reg)?, self.register(out_reg)?))
    }

    /// `|x>_in |z>_out -> |x>_in |z xor f(x)>_out`.
    pub fn apply_xor_oracle(
        &mut self,
        f: &ClassicalFunctionTable,
        in_reg: &str,
        out_reg: &str,
    ) -> Result<()> {
        let (input, output) = self.oracle_registers(in_reg, out_reg)?;
        ensure!(
            input.width == f.domain_bits(),
            "register {in_reg} has width {} but f takes {} bits",
            input.width,
            f.domain_bits()
        );
        ensure!(
            output.width == f.codomain_bits(),
            "register {out_reg} has width {} but f returns {} bits",
            output.width,
            f.codomain_bits()
        );
        self.swap_pairs(|i| {
            let x = input.read(i);
            i ^ ((f.eval(x) as usize) << output.offset)
        });
        Ok(())
    }

    /// XOR-oracle for an arbitrary closure; `f` must return values that fit
    /// the output register.
    pub fn apply_xor_fn(
        &mut self,
        in_reg: &str,
        out_reg: &str,
        f: impl Fn(u64) -> u64,
    ) -> Result<()> {
        let (input, output) = self.oracle_registers(in_reg, out_reg)?;
        let dim = output.dim();
        self.swap_pairs(|i| {
            let v = f(input.read(i));
            debug_assert!(v < dim);
            i ^ ((v as usize) << output.offset)
        });
        Ok(())
    }

    /// `out ^= f(values of in_regs)`, e.g. a Toffoli with `f = a & b`. The
    /// output register must not be among the inputs.
    pub fn apply_xor_multi(
        &mut self,
        in_regs: &[&str],
        out_reg: &str,
        f: impl Fn(&[u64]) -> u64,
    ) -> Result<()> {
        ensure!(!in_regs.contains(&out_reg), "output {out_reg} is also an input");
        ensure!(in_regs.len() <= 8, "at most 8 input registers");
        let inputs = in_regs
            .iter()
            .map(|r| self.register(r))
            .collect::<Result<Vec<_>>>()?;
        let output = self.register(out_reg)?;
        let dim = output.dim();
        self.swap_pairs(|i| {
            let mut buf = [0u64; 8];
            for (b, r) in buf.iter_mut().zip(&inputs) {
                *b = r.read(i);
            }
            let v = f(&buf[..inputs.len()]);
            debug_assert!(v < dim);
            i ^ ((v as usize) << output.offset)
        });
        Ok(())
    }

    /// Exchanges bits `a` and `b` (counted from the register's least
    /// significant bit) of every basis label.
    pub fn apply_swap_bits(&mut self, reg: &str, a: usize, b: usize) -> Result<()> {
        let r = self.register(reg)?;
        ensure!(
            a < r.width && b < r.width,
            "bit index out of range for {reg} of width {}",
            r.width
        );
        if a == b {
            return Ok(());
        }
        let (pa, pb) = (r.offset + a, r.offset + b);
        self.swap_pairs(|i| {
            let ba = (i >> pa) & 1;
            let bb = (i >> pb) & 1;
            if ba == bb {
                i
            } else {
                i ^ (1 << pa) ^ (1 << pb)
            }
        });
        Ok(())
    }

    /// Bitwise NOT of a register.
    pub fn apply_not(&mut self, reg: &str) -> Result<()> {
        let r = self.register(reg)?;
        let m = r.mask();
        self.swap_pairs(|i| i ^ m);
        Ok(())
    }

    /// Hadamard on every qubit of `reg`.
    pub fn apply_hadamard(&mut self, reg: &str) -> Result<()> {
        let r = self.register(reg)?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for q in r.offset..r.offset + r.width {
            let bit = 1usize << q;
            for i in 0..self.amps.len() {
                if i & bit == 0 {
                    let (a, b) = (self.amps[i], self.amps[i | bit]);
                    self.amps[i] = (a + b) * s;
                    self.amps[i | bit] = (a - b) * s;
                }
            }
        }
        Ok(())
    }

    /// Multiplies by `phase` every amplitude whose `reg` value satisfies `pred`.
    pub fn apply_phase_where(
        &mut self,
        reg: &str,
        phase: Complex64,
        pred: impl Fn(u64) -> bool,
    ) -> Result<()> {
        let r = self.register(reg)?;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if pred(r.read(i)) {
                *a *= phase;
            }
        }
        Ok(())
    }

    /// Inversion about the mean of `reg` (the Grover diffusion `2|s><s| - I`),
    /// applied independently for each assignment of the other qubits.
    pub fn reflect_about_uniform(&mut self, reg: &str) -> Result<()> {
        let r = self.register(reg)?;
        let dim = r.dim();
        let mask = r.mask();
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            let mut sum = Complex64::new(0.0, 0.0);
            for v in 0..dim {
                sum += self.amps[r.write(base, v)];
            }
            let twice_mean = sum * (2.0 / dim as f64);
            for v in 0..dim {
                let i = r.write(base, v);
                self.amps[i] = twice_mean - self.amps[i];
            }
        }
        Ok(())
    }

    /// Marginal probability of each value of `reg`, indexed by value.
    pub fn outcome_distribution(&self, reg: &str) -> Result<Vec<f64>> {
        let r = self.register(reg)?;
        let mut probs = vec![0.0; r.dim() as usize];
        for (i, a) in self.amps.iter().enumerate() {
            probs[r.read(i) as usize] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// `||Pi_S |psi>||^2` for the projector onto `reg` values in `subset`.
    pub fn projector_mass(&self, reg: &str, subset: &[u64]) -> Result<f64> {
        let r = self.register(reg)?;
        let mut member = vec![false; r.dim() as usize];
        for &v in subset {
            ensure!(v < r.dim(), "subset value {v} does not fit register {reg}");
            member[v as usize] = true;
        }
        Ok(self.mass_where(&r, |v| member[v as usize]))
    }

    pub(crate) fn mass_where(&self, r: &Register, pred: impl Fn(u64) -> bool) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| pred(r.read(*i)))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Euclidean distance between amplitude vectors.
    pub fn euclidean_distance(&self, other: &StateVector) -> Result<f64> {
        ensure!(
            self.num_qubits() == other.num_qubits(),
            "dimension mismatch: {} vs {} qubits",
            self.num_qubits(),
            other.num_qubits()
        );
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Largest entrywise deviation between two states of equal size.
    pub fn max_deviation(&self, other: &StateVector) -> Result<f64> {
        ensure!(self.amps.len() == other.amps.len(), "dimension mismatch");
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Tensors a fresh all-zero register onto the top of the qubit array.
    pub fn extend(&mut self, name: &str, width: usize) -> Result<()> {
        let layout = self.layout.with_appended(name, width)?;
        self.amps
            .resize(1usize << layout.num_qubits(), Complex64::new(0.0, 0.0));
        self.layout = layout;
        Ok(())
    }

    /// Removes the top-most register, which must have been returned to |0>.
    pub fn discard_clean(&mut self, name: &str) -> Result<()> {
        let r = self.register(name)?;
        ensure!(
            r.offset + r.width == self.num_qubits(),
            "register {name} is not the top-most register"
        );
        let keep = 1usize << r.offset;
        let dirty: f64 = self.amps[keep..].iter().map(|a| a.norm_sqr()).sum();
        ensure!(
            dirty <= BASIS_TOL,
            "register {name} was not uncomputed (residual mass {dirty})"
        );
        self.amps.truncate(keep);
        let regs = self
            .layout
            .registers()
            .iter()
            .filter(|x| x.name != name)
            .map(|x| (x.name.clone(), x.offset, x.width))
            .collect();
        self.layout = RegisterLayout::new(regs, r.offset)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(spec: &[(&str, usize)]) -> RegisterLayout {
        RegisterLayout::packed(spec).unwrap()
    }

    #[test]
    fn xor_with_zero_function_is_identity() {
        let l = layout(&[("x", 2), ("z", 2)]);
        let mut s = StateVector::zero(l);
        s.apply_hadamard("x").unwrap();
        s.apply_hadamard("z").unwrap();
        let before = s.clone();
        let f = ClassicalFunctionTable::zero(2, 2).unwrap();
        s.apply_xor_oracle(&f, "x", "z").unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn xor_oracle_on_basis_state_is_table_lookup() {
        let f = ClassicalFunctionTable::new(1, 1, vec![1, 0]).unwrap();
        let l = layout(&[("x", 1), ("z", 1)]);
        let mut s = StateVector::basis(l.clone(), &[("x", 0), ("z", 0)]).unwrap();
        s.apply_xor_oracle(&f, "x", "z").unwrap();
        assert_eq!(s, StateVector::basis(l, &[("x", 0), ("z", 1)]).unwrap());
    }

    #[test]
    fn xor_oracle_register_contracts() {
        let f = ClassicalFunctionTable::zero(2, 2).unwrap();
        let mut s = StateVector::zero(layout(&[("x", 2), ("z", 3)]));
        assert!(s.apply_xor_oracle(&f, "x", "z").is_err());
        assert!(s.apply_xor_oracle(&f, "x", "x").is_err());
        assert!(s.apply_xor_oracle(&f, "x", "nope").is_err());
    }

    #[test]
    fn swap_bits_exchanges_labels() {
        let l = layout(&[("w", 2)]);
        let mut s = StateVector::basis(l.clone(), &[("w", 0b01)]).unwrap();
        s.apply_swap_bits("w", 0, 1).unwrap();
        assert_eq!(s, StateVector::basis(l.clone(), &[("w", 0b10)]).unwrap());
        let before = s.clone();
        s.apply_swap_bits("w", 1, 1).unwrap();
        assert_eq!(s, before);
        assert!(s.apply_swap_bits("w", 0, 2).is_err());
    }

    #[test]
    fn swap_bits_keeps_uniform_state() {
        let mut s = StateVector::zero(layout(&[("w", 3)]));
        s.apply_hadamard("w").unwrap();
        let before = s.clone();
        s.apply_swap_bits("w", 0, 2).unwrap();
        assert!(s.max_deviation(&before).unwrap() < 1e-15);
    }

    #[test]
    fn distribution_of_basis_and_uniform_states() {
        let l = layout(&[("a", 2), ("b", 1)]);
        let s = StateVector::basis(l.clone(), &[("a", 3), ("b", 1)]).unwrap();
        assert_eq!(s.outcome_distribution("a").unwrap(), vec![0.0, 0.0, 0.0, 1.0]);
        let mut u = StateVector::zero(l);
        u.apply_hadamard("a").unwrap();
        for p in u.outcome_distribution("a").unwrap() {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn projector_mass_edge_cases() {
        let l = layout(&[("w", 2)]);
        let s = StateVector::basis(l, &[("w", 3)]).unwrap();
        assert_eq!(s.projector_mass("w", &[0, 1, 2, 3]).unwrap(), 1.0);
        assert_eq!(s.projector_mass("w", &[]).unwrap(), 0.0);
        assert_eq!(s.projector_mass("w", &[3]).unwrap(), 1.0);
        assert!(s.projector_mass("w", &[4]).is_err());
    }

    #[test]
    fn euclidean_distance_examples() {
        let l = layout(&[("w", 2)]);
        let a = StateVector::basis(l.clone(), &[("w", 1)]).unwrap();
        let b = StateVector::basis(l.clone(), &[("w", 2)]).unwrap();
        assert_eq!(a.euclidean_distance(&a).unwrap(), 0.0);
        assert!((a.euclidean_distance(&b).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let neg = StateVector::superpose(&[(Complex64::new(-1.0, 0.0), &a)]).unwrap();
        assert!((a.euclidean_distance(&neg).unwrap() - 2.0).abs() < 1e-15);
        let other = StateVector::zero(layout(&[("w", 3)]));
        assert!(a.euclidean_distance(&other).is_err());
    }

    #[test]
    fn extend_and_discard_round_trip() {
        let mut s = StateVector::zero(layout(&[("w", 2)]));
        s.apply_hadamard("w").unwrap();
        let before = s.clone();
        s.extend("aux", 3).unwrap();
        assert_eq!(s.num_qubits(), 5);
        s.discard_clean("aux").unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn discard_rejects_dirty_register() {
        let mut s = StateVector::zero(layout(&[("w", 1)]));
        s.extend("aux", 1).unwrap();
        s.apply_not("aux").unwrap();
        assert!(s.discard_clean("aux").is_err());
    }
}
