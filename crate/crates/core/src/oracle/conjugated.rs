use super::{
    aux_name, decode_flagged, encode_flagged, map_input, Direction, OraclePath, Permutation,
    QueryMeter, QueryOracle,
};
use crate::error::{ensure, Result};
use crate::sim::StateVector;

/// Oracle access to `sigma1 ∘ f ∘ sigma2` and its inverse punctured at
/// `sigma1(y)`, built on top of an oracle for `f` with inverse punctured at
/// `y`.
///
/// The circuit path is the compute / query / uncompute construction with two
/// aux registers: every logical query makes exactly two queries to the
/// underlying oracle, in the same direction. On the inverse side the
/// relabelings act as `(w, 0) -> (sigma^-1(w), 0)` and leave flagged inputs
/// fixed, so the reject element passes through unchanged.
pub struct ConjugatedOracle<'a> {
    base: &'a mut dyn QueryOracle,
    sigma1: Permutation,
    sigma2: Permutation,
    sigma1_inv: Permutation,
    sigma2_inv: Permutation,
    image: u64,
    path: OraclePath,
    meter: QueryMeter,
}

/// Wraps `base` (punctured at `y`) into the conjugated oracle.
pub fn compose_conjugated<'a>(
    sigma1: &Permutation,
    sigma2: &Permutation,
    base: &'a mut dyn QueryOracle,
    y: u64,
    path: OraclePath,
) -> Result<ConjugatedOracle<'a>> {
    let n = base.n_bits();
    ensure!(
        sigma1.n_bits() == n && sigma2.n_bits() == n,
        "conjugators act on {} / {} bits, oracle on {n}",
        sigma1.n_bits(),
        sigma2.n_bits()
    );
    ensure!(y < 1u64 << n, "image {y} out of range");
    Ok(ConjugatedOracle {
        base,
        sigma1: sigma1.clone(),
        sigma2: sigma2.clone(),
        sigma1_inv: sigma1.inverse(),
        sigma2_inv: sigma2.inverse(),
        image: sigma1.apply(y),
        path,
        meter: QueryMeter::new(None),
    })
}

fn relabel_flagged(sigma: &Permutation, v: u64) -> u64 {
    match decode_flagged(v) {
        (w, 0) => encode_flagged(sigma.apply(w), 0),
        _ => v,
    }
}

impl<'a> ConjugatedOracle<'a> {
    pub fn with_budget(mut self, budget: u64) -> Self {
        self.meter.set_budget(Some(budget));
        self
    }

    /// The puncture point `sigma1(y)` of the conjugated inverse.
    pub fn image(&self) -> u64 {
        self.image
    }

    fn circuit_forward(&mut self, state: &mut StateVector, w: &str, z: &str) -> Result<()> {
        let n = self.sigma1.n_bits();
        let aux1 = aux_name(state, "conj.aux1");
        state.extend(&aux1, n)?;
        let aux2 = aux_name(state, "conj.aux2");
        state.extend(&aux2, n)?;
        let (s1, s2) = (&self.sigma1, &self.sigma2);

        state.apply_xor_fn(w, &aux2, |v| s2.apply(v))?;
        self.base.forward_query(state, &aux2, &aux1)?;
        state.apply_xor_fn(&aux1, z, |v| s1.apply(v))?;
        self.base.forward_query(state, &aux2, &aux1)?;
        state.apply_xor_fn(w, &aux2, |v| s2.apply(v))?;

        state.discard_clean(&aux2)?;
        state.discard_clean(&aux1)
    }

    fn circuit_inverse(&mut self, state: &mut StateVector, w: &str, z: &str) -> Result<()> {
        let n = self.sigma1.n_bits() + 1;
        let aux1 = aux_name(state, "conj.aux1");
        state.extend(&aux1, n)?;
        let aux2 = aux_name(state, "conj.aux2");
        state.extend(&aux2, n)?;
        let (s1i, s2i) = (&self.sigma1_inv, &self.sigma2_inv);

        state.apply_xor_fn(w, &aux1, |v| relabel_flagged(s1i, v))?;
        self.base.inverse_query(state, &aux1, &aux2)?;
        state.apply_xor_fn(&aux2, z, |v| relabel_flagged(s2i, v))?;
        self.base.inverse_query(state, &aux1, &aux2)?;
        state.apply_xor_fn(w, &aux1, |v| relabel_flagged(s1i, v))?;

        state.discard_clean(&aux2)?;
        state.discard_clean(&aux1)
    }
}

impl QueryOracle for ConjugatedOracle<'_> {
    fn n_bits(&self) -> usize {
        self.sigma1.n_bits()
    }

    fn forward_value(&self, w: u64) -> u64 {
        self.sigma1
            .apply(self.base.forward_value(self.sigma2.apply(w)))
    }

    fn inverse_value(&self, w_flag: u64) -> u64 {
        let inner = self
            .base
            .inverse_value(relabel_flagged(&self.sigma1_inv, w_flag));
        relabel_flagged(&self.sigma2_inv, inner)
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
        let mapped = match direction {
            Direction::Forward => map_input(input, |v| self.sigma2.apply(v)),
            Direction::Inverse => map_input(input, |v| relabel_flagged(&self.sigma1_inv, v)),
        };
        // compute, then uncompute
        self.base.charge(direction, &mapped)?;
        self.base.charge(direction, &mapped)
    }

    fn apply_circuit(
        &mut self,
        direction: Direction,
        state: &mut StateVector,
        in_reg: &str,
        out_reg: &str,
    ) -> Result<()> {
        match direction {
            Direction::Forward => self.circuit_forward(state, in_reg, out_reg),
            Direction::Inverse => self.circuit_inverse(state, in_reg, out_reg),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{make_two_sided, reject_element, PuncturedInverse};
    use crate::sim::RegisterLayout;

    fn functional_reference(
        pi: &Permutation,
        s1: &Permutation,
        s2: &Permutation,
        y: u64,
    ) -> (Permutation, PuncturedInverse) {
        let composed = s1.compose(&pi.compose(s2).unwrap()).unwrap();
        let inv = PuncturedInverse::new(composed.clone(), s1.apply(y)).unwrap();
        (composed, inv)
    }

    #[test]
    fn identity_conjugators_behave_like_base() {
        let pi = Permutation::from_seed(3, 17);
        let mut base = make_two_sided(pi.clone(), 4).unwrap();
        let id = Permutation::identity(3);
        let reference = base.clone();
        let c = compose_conjugated(&id, &id, &mut base, 4, OraclePath::Functional).unwrap();
        for w in 0..8 {
            assert_eq!(c.forward_value(w), reference.forward_value(w));
        }
        for v in 0..16 {
            assert_eq!(c.inverse_value(v), reference.inverse_value(v));
        }
    }

    #[test]
    fn both_paths_match_functional_composition_exhaustively() {
        for seed in 0..20u64 {
            let n = 2;
            let pi = Permutation::from_seed(n, seed);
            let s1 = Permutation::from_seed(n, seed + 1000);
            let s2 = Permutation::from_seed(n, seed + 2000);
            let y = seed % 4;
            let (composed, inv) = functional_reference(&pi, &s1, &s2, y);
            for path in [OraclePath::Functional, OraclePath::Circuit] {
                let mut base = make_two_sided(pi.clone(), y).unwrap();
                let mut c = compose_conjugated(&s1, &s2, &mut base, y, path).unwrap();
                let lf = RegisterLayout::packed(&[("w", n), ("z", n)]).unwrap();
                for w in 0..4 {
                    let mut s = StateVector::basis(lf.clone(), &[("w", w)]).unwrap();
                    c.forward_query(&mut s, "w", "z").unwrap();
                    let want =
                        StateVector::basis(lf.clone(), &[("w", w), ("z", composed.apply(w))]).unwrap();
                    assert_eq!(s, want, "forward seed {seed} path {path:?} w {w}");
                }
                let li = RegisterLayout::packed(&[("w", n + 1), ("z", n + 1)]).unwrap();
                for v in 0..8 {
                    let mut s = StateVector::basis(li.clone(), &[("w", v)]).unwrap();
                    c.inverse_query(&mut s, "w", "z").unwrap();
                    let want = StateVector::basis(li.clone(), &[("w", v), ("z", inv.eval(v))]).unwrap();
                    assert_eq!(s, want, "inverse seed {seed} path {path:?} v {v}");
                }
                assert_eq!(c.query_count(), 4 + 8);
                drop(c);
                assert_eq!(base.meter().forward_count(), 8);
                assert_eq!(base.meter().inverse_count(), 16);
            }
        }
    }

    #[test]
    fn puncture_moves_with_sigma1() {
        let pi = Permutation::from_seed(3, 2);
        let s1 = Permutation::from_seed(3, 3);
        let s2 = Permutation::from_seed(3, 4);
        let y = 6;
        let mut base = make_two_sided(pi, y).unwrap();
        let c = compose_conjugated(&s1, &s2, &mut base, y, OraclePath::Functional).unwrap();
        assert_eq!(c.image(), s1.apply(y));
        assert_eq!(
            c.inverse_value(encode_flagged(s1.apply(y), 0)),
            reject_element(3)
        );
    }

    #[test]
    fn mismatched_sizes_rejected() {
        let mut base = make_two_sided(Permutation::identity(3), 0).unwrap();
        let s = Permutation::identity(2);
        assert!(compose_conjugated(&s, &s, &mut base, 0, OraclePath::Functional).is_err());
    }

    #[test]
    fn circuit_and_functional_paths_agree_on_base_probe_mass() {
        let n = 3;
        let pi = Permutation::from_seed(n, 5);
        let s1 = Permutation::from_seed(n, 6);
        let s2 = Permutation::from_seed(n, 7);
        let mut masses = Vec::new();
        for path in [OraclePath::Functional, OraclePath::Circuit] {
            let mut base = make_two_sided(pi.clone(), 1).unwrap();
            let pf = base.add_probe(Direction::Forward, &[0, 3, 5]).unwrap();
            let pinv = base.add_probe(Direction::Inverse, &[2, 9]).unwrap();
            {
                let mut c = compose_conjugated(&s1, &s2, &mut base, 1, path).unwrap();
                let l = RegisterLayout::packed(&[("w", n), ("z", n)]).unwrap();
                let mut s = StateVector::zero(l);
                s.apply_hadamard("w").unwrap();
                c.forward_query(&mut s, "w", "z").unwrap();
                let li = RegisterLayout::packed(&[("w", n + 1), ("z", n + 1)]).unwrap();
                let mut t = StateVector::zero(li);
                t.apply_hadamard("w").unwrap();
                c.inverse_query(&mut t, "w", "z").unwrap();
            }
            masses.push((
                base.total_query_magnitude(pf).unwrap(),
                base.total_query_magnitude(pinv).unwrap(),
            ));
        }
        assert!((masses[0].0 - masses[1].0).abs() < 1e-12);
        assert!((masses[0].1 - masses[1].1).abs() < 1e-12);
        // three of eight forward inputs, two of sixteen flagged inputs, twice each
        assert!((masses[0].0 - 2.0 * 3.0 / 8.0).abs() < 1e-12);
        assert!((masses[0].1 - 2.0 * 2.0 / 16.0).abs() < 1e-12);
    }
}
