use super::{decode_flagged, encode_flagged, reject_element, Permutation, QueryMeter, QueryOracle};
use crate::error::{ensure, Result};
use crate::sim::ClassicalFunctionTable;

/// `pi^-1` punctured at `y`: `(w, 0) -> (pi^-1(w), 0)` for `w != y`, every
/// other input maps to the reject element `(N - 1, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuncturedInverse {
    pub perm: Permutation,
    pub punctured_image: u64,
}

impl PuncturedInverse {
    pub fn new(perm: Permutation, punctured_image: u64) -> Result<Self> {
        ensure!(
            punctured_image < perm.size(),
            "punctured image {punctured_image} outside [0, {})",
            perm.size()
        );
        Ok(Self {
            perm,
            punctured_image,
        })
    }

    /// Evaluates on the flagged encoding `w << 1 | b`.
    pub fn eval(&self, w_flag: u64) -> u64 {
        inverse_with_puncture(&self.perm, Some(self.punctured_image), w_flag)
    }

    pub fn as_function(&self) -> ClassicalFunctionTable {
        let n = self.perm.n_bits();
        ClassicalFunctionTable::from_fn(n + 1, n + 1, |v| self.eval(v)).expect("fits n+1 bits")
    }
}

pub(crate) fn inverse_with_puncture(perm: &Permutation, puncture: Option<u64>, w_flag: u64) -> u64 {
    let (w, b) = decode_flagged(w_flag);
    if b == 0 && Some(w) != puncture {
        encode_flagged(perm.invert(w), 0)
    } else {
        reject_element(perm.n_bits())
    }
}

/// The single merged oracle `(w, a) -> pi(w)` if `a = 0`, `pi^-1(w)` if
/// `a = 1` and `w != y`, and `None` (reject) if `a = 1` and `w = y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergedOracleFunction {
    pub perm: Permutation,
    pub punctured_image: u64,
}

impl MergedOracleFunction {
    pub fn eval(&self, w: u64, a: u64) -> Option<u64> {
        match a {
            0 => Some(self.perm.apply(w)),
            _ if w != self.punctured_image => Some(self.perm.invert(w)),
            _ => None,
        }
    }
}

/// The two-sided oracle pair `O_pi`, `O_{pi^-1_{⊥y}}` with a query meter.
///
/// Cloning copies the meter; permutation tables are shared.
#[derive(Clone, Debug)]
pub struct OracleHandle {
    perm: Permutation,
    puncture: Option<u64>,
    meter: QueryMeter,
}

/// Builds the instrumented pair for `perm` punctured at `y`, counters zeroed
/// and no budget.
pub fn make_two_sided(perm: Permutation, y: u64) -> Result<OracleHandle> {
    ensure!(y < perm.size(), "image {y} outside [0, {})", perm.size());
    Ok(OracleHandle {
        perm,
        puncture: Some(y),
        meter: QueryMeter::new(None),
    })
}

impl OracleHandle {
    /// Forward oracle with an unpunctured inverse.
    pub fn unpunctured(perm: Permutation) -> Self {
        Self {
            perm,
            puncture: None,
            meter: QueryMeter::new(None),
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.meter.set_budget(Some(budget));
        self
    }

    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }

    pub fn punctured_image(&self) -> Option<u64> {
        self.puncture
    }

    pub fn forward_table(&self) -> ClassicalFunctionTable {
        self.perm.as_function()
    }

    pub fn inverse_table(&self) -> ClassicalFunctionTable {
        let n = self.perm.n_bits();
        ClassicalFunctionTable::from_fn(n + 1, n + 1, |v| self.inverse_value(v))
            .expect("fits n+1 bits")
    }
}

impl QueryOracle for OracleHandle {
    fn n_bits(&self) -> usize {
        self.perm.n_bits()
    }

    fn forward_value(&self, w: u64) -> u64 {
        self.perm.apply(w)
    }

    fn inverse_value(&self, w_flag: u64) -> u64 {
        inverse_with_puncture(&self.perm, self.puncture, w_flag)
    }

    fn meter(&self) -> &QueryMeter {
        &self.meter
    }

    fn meter_mut(&mut self) -> &mut QueryMeter {
        &mut self.meter
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Direction;
    use crate::sim::{RegisterLayout, StateVector};

    #[test]
    fn identity_inverse_off_and_on_puncture() {
        let h = make_two_sided(Permutation::identity(2), 0).unwrap();
        assert_eq!(h.inverse_value(encode_flagged(3, 0)), encode_flagged(3, 0));
        assert_eq!(h.inverse_value(encode_flagged(0, 0)), encode_flagged(3, 1));
    }

    #[test]
    fn flagged_inputs_always_reject() {
        let p = Permutation::from_seed(3, 11);
        let h = make_two_sided(p, 5).unwrap();
        for w in 0..8 {
            assert_eq!(h.inverse_value(encode_flagged(w, 1)), reject_element(3));
        }
    }

    #[test]
    fn y_out_of_range_rejected() {
        assert!(make_two_sided(Permutation::identity(2), 4).is_err());
    }

    #[test]
    fn forward_query_on_basis_state() {
        let p = Permutation::from_table(vec![3, 7, 5, 0, 1, 2, 4, 6]).unwrap();
        let mut h = make_two_sided(p, 0).unwrap();
        let l = RegisterLayout::packed(&[("w", 3), ("z", 3)]).unwrap();
        let mut s = StateVector::basis(l.clone(), &[("w", 2)]).unwrap();
        let probe = h.add_probe(Direction::Forward, &[2]).unwrap();
        h.forward_query(&mut s, "w", "z").unwrap();
        assert_eq!(s, StateVector::basis(l, &[("w", 2), ("z", 5)]).unwrap());
        assert_eq!(h.query_count(), 1);
        assert_eq!(h.total_query_magnitude(probe).unwrap(), 1.0);
    }

    #[test]
    fn inverse_query_examples_and_involution() {
        let p = Permutation::from_seed(3, 4);
        let y = p.apply(6);
        let mut h = make_two_sided(p.clone(), y).unwrap();
        let l = RegisterLayout::packed(&[("wb", 4), ("zc", 4)]).unwrap();
        let x = 3;
        let mut s = StateVector::basis(l.clone(), &[("wb", encode_flagged(p.apply(x), 0))]).unwrap();
        h.inverse_query(&mut s, "wb", "zc").unwrap();
        let want = StateVector::basis(
            l.clone(),
            &[("wb", encode_flagged(p.apply(x), 0)), ("zc", encode_flagged(x, 0))],
        )
        .unwrap();
        assert_eq!(s, want);

        let mut r = StateVector::basis(l.clone(), &[("wb", encode_flagged(y, 0))]).unwrap();
        h.inverse_query(&mut r, "wb", "zc").unwrap();
        assert_eq!(r.amplitude(&[("wb", encode_flagged(y, 0)), ("zc", 15)]).unwrap().re, 1.0);

        let mut u = StateVector::zero(l);
        u.apply_hadamard("wb").unwrap();
        u.apply_hadamard("zc").unwrap();
        let before = u.clone();
        h.inverse_query(&mut u, "wb", "zc").unwrap();
        h.inverse_query(&mut u, "wb", "zc").unwrap();
        assert!(u.max_deviation(&before).unwrap() < 1e-12);
    }

    #[test]
    fn budget_exceeded_leaves_state_alone() {
        let mut h = make_two_sided(Permutation::identity(2), 1).unwrap().with_budget(1);
        assert_eq!(h.forward_classical(2).unwrap(), 2);
        assert!(matches!(
            h.forward_classical(2),
            Err(crate::Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn merged_function_agrees_with_pair() {
        let p = Permutation::from_seed(3, 8);
        let y = 5;
        let h = make_two_sided(p.clone(), y).unwrap();
        let m = MergedOracleFunction {
            perm: p,
            punctured_image: y,
        };
        for w in 0..8 {
            assert_eq!(m.eval(w, 0), Some(h.forward_value(w)));
            let inv = h.inverse_value(encode_flagged(w, 0));
            match m.eval(w, 1) {
                Some(x) => assert_eq!(inv, encode_flagged(x, 0)),
                None => assert_eq!(inv, reject_element(3)),
            }
        }
    }

    #[test]
    fn punctured_inverse_type_matches_handle() {
        let p = Permutation::from_seed(2, 1);
        let pi = PuncturedInverse::new(p.clone(), 2).unwrap();
        let h = make_two_sided(p, 2).unwrap();
        assert_eq!(pi.as_function(), h.inverse_table());
        assert!(PuncturedInverse::new(Permutation::identity(2), 9).is_err());
    }
}
