use super::{
    encode_flagged, reject_element, select_circuit, Direction, OraclePath, QueryMeter, QueryOracle,
};
use crate::error::{ensure, Result};
use crate::sim::StateVector;

/// What the decoder knows in the second encoding case: `pi` outside the good
/// set `G`, the set `G` itself and the challenge image `y`.
///
/// The oracle it induces is `pi_bar(w) = y` for `w` in `G`, `pi(w)` otherwise,
/// with inverse `pi^-1(w) || 0` for `w` outside `pi(G)` and flag `0`, and the
/// reject element everywhere else.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QracDecodeOracle {
    /// `Some(pi(w))` for `w` outside `G`, `None` for `w` in `G`.
    pub known_part: Vec<Option<u64>>,
    pub good_set: Vec<u64>,
    pub target_image: u64,
}

impl QracDecodeOracle {
    pub fn n_bits(&self) -> usize {
        self.known_part.len().trailing_zeros() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.known_part.len();
        ensure!(
            n.is_power_of_two() && n >= 2,
            "known part has {n} entries, expected a power of two"
        );
        ensure!((self.target_image as usize) < n, "target image out of range");
        let mut in_g = vec![false; n];
        for &w in &self.good_set {
            ensure!((w as usize) < n, "good-set element {w} out of range");
            ensure!(!in_g[w as usize], "good-set element {w} repeated");
            in_g[w as usize] = true;
        }
        let mut seen = vec![false; n];
        for (w, v) in self.known_part.iter().enumerate() {
            match v {
                Some(v) => {
                    ensure!(!in_g[w], "known part defines pi({w}) although {w} is in G");
                    ensure!((*v as usize) < n && !seen[*v as usize], "known part is not injective");
                    seen[*v as usize] = true;
                }
                None => ensure!(in_g[w], "pi({w}) unknown but {w} is not in G"),
            }
        }
        Ok(())
    }
}

/// Instrumented oracle pair for `pi_bar_{⊥y}`.
#[derive(Clone, Debug)]
pub struct QracDecodeHandle {
    data: QracDecodeOracle,
    in_good: Vec<bool>,
    /// `pi^-1` on images outside `pi(G)`.
    known_inverse: Vec<Option<u64>>,
    path: OraclePath,
    meter: QueryMeter,
}

pub fn build_qrac_decode_oracle(d: QracDecodeOracle, path: OraclePath) -> Result<QracDecodeHandle> {
    d.validate()?;
    let n = d.known_part.len();
    let mut in_good = vec![false; n];
    for &w in &d.good_set {
        in_good[w as usize] = true;
    }
    let mut known_inverse = vec![None; n];
    for (w, v) in d.known_part.iter().enumerate() {
        if let Some(v) = v {
            known_inverse[*v as usize] = Some(w as u64);
        }
    }
    Ok(QracDecodeHandle {
        data: d,
        in_good,
        known_inverse,
        path,
        meter: QueryMeter::new(None),
    })
}

impl QracDecodeHandle {
    pub fn with_budget(mut self, budget: u64) -> Self {
        self.meter.set_budget(Some(budget));
        self
    }

    pub fn data(&self) -> &QracDecodeOracle {
        &self.data
    }

    /// Indicator of the inverse branch that answers from the known part.
    fn inverse_known(&self, w_flag: u64) -> bool {
        w_flag & 1 == 0 && self.known_inverse[(w_flag >> 1) as usize].is_some()
    }
}

impl QueryOracle for QracDecodeHandle {
    fn n_bits(&self) -> usize {
        self.data.n_bits()
    }

    fn forward_value(&self, w: u64) -> u64 {
        self.data.known_part[w as usize].unwrap_or(self.data.target_image)
    }

    fn inverse_value(&self, w_flag: u64) -> u64 {
        match (w_flag & 1, self.known_inverse[(w_flag >> 1) as usize]) {
            (0, Some(x)) => encode_flagged(x, 0),
            _ => reject_element(self.n_bits()),
        }
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

    fn apply_circuit(
        &mut self,
        direction: Direction,
        state: &mut StateVector,
        in_reg: &str,
        out_reg: &str,
    ) -> Result<()> {
        let n = self.n_bits();
        let this = &*self;
        match direction {
            Direction::Forward => select_circuit(
                state,
                in_reg,
                out_reg,
                n,
                |s, w, g| s.apply_xor_fn(w, g, |v| this.in_good[v as usize] as u64),
                |w| this.data.known_part[w as usize].unwrap_or(0),
                this.data.target_image,
            ),
            // selector 1 picks the reject constant, 0 the known inverse
            Direction::Inverse => select_circuit(
                state,
                in_reg,
                out_reg,
                n + 1,
                |s, w, g| s.apply_xor_fn(w, g, |v| !this.inverse_known(v) as u64),
                |v| {
                    this.known_inverse[(v >> 1) as usize]
                        .map(|x| encode_flagged(x, 0))
                        .unwrap_or(0)
                },
                reject_element(n),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{make_two_sided, Permutation};
    use crate::sim::RegisterLayout;

    fn decode_data(perm: &Permutation, good: &[u64], y: u64) -> QracDecodeOracle {
        QracDecodeOracle {
            known_part: (0..perm.size())
                .map(|w| (!good.contains(&w)).then(|| perm.apply(w)))
                .collect(),
            good_set: good.to_vec(),
            target_image: y,
        }
    }

    #[test]
    fn empty_good_set_is_pi() {
        let p = Permutation::from_seed(3, 2);
        let h = build_qrac_decode_oracle(decode_data(&p, &[], 4), OraclePath::Functional).unwrap();
        let plain = make_two_sided(p.clone(), 4).unwrap();
        for w in 0..8 {
            assert_eq!(h.forward_value(w), p.apply(w));
            if p.apply(w) != 4 {
                let v = encode_flagged(p.apply(w), 0);
                assert_eq!(h.inverse_value(v), plain.inverse_value(v));
            }
        }
    }

    #[test]
    fn good_set_maps_to_target_and_is_punctured() {
        let p = Permutation::from_seed(3, 5);
        let g = [1, 6];
        let y = p.apply(6);
        let h = build_qrac_decode_oracle(decode_data(&p, &g, y), OraclePath::Functional).unwrap();
        for &w in &g {
            assert_eq!(h.forward_value(w), y);
            assert_eq!(h.inverse_value(encode_flagged(p.apply(w), 0)), reject_element(3));
        }
    }

    #[test]
    fn inconsistent_known_part_rejected() {
        let p = Permutation::from_seed(3, 5);
        let mut d = decode_data(&p, &[1, 6], 0);
        d.known_part[2] = None;
        assert!(build_qrac_decode_oracle(d, OraclePath::Functional).is_err());
        let mut d = decode_data(&p, &[1, 6], 0);
        d.known_part[3] = d.known_part[4];
        assert!(d.validate().is_err());
    }

    #[test]
    fn circuit_equals_functional_definition() {
        let n = 3;
        for seed in 0..10 {
            let p = Permutation::from_seed(n, seed);
            let mut coins = crate::rng::Coins::from_seed(seed + 100);
            let a = coins.below(8);
            let b = (a + 1 + coins.below(7)) % 8;
            let g = [a, b];
            let y = p.apply(a);
            let d = decode_data(&p, &g, y);
            let func = build_qrac_decode_oracle(d.clone(), OraclePath::Functional).unwrap();
            let mut circ = build_qrac_decode_oracle(d, OraclePath::Circuit).unwrap();
            let lf = RegisterLayout::packed(&[("w", n), ("z", n)]).unwrap();
            for w in 0..8 {
                let mut s = StateVector::basis(lf.clone(), &[("w", w)]).unwrap();
                circ.forward_query(&mut s, "w", "z").unwrap();
                let want = if g.contains(&w) { y } else { p.apply(w) };
                assert_eq!(s, StateVector::basis(lf.clone(), &[("w", w), ("z", want)]).unwrap());
                assert_eq!(func.forward_value(w), want);
            }
            let li = RegisterLayout::packed(&[("w", n + 1), ("z", n + 1)]).unwrap();
            for v in 0..16 {
                let mut s = StateVector::basis(li.clone(), &[("w", v)]).unwrap();
                circ.inverse_query(&mut s, "w", "z").unwrap();
                let (w, b) = crate::oracle::decode_flagged(v);
                let want = if b == 0 && !g.iter().any(|&x| p.apply(x) == w) {
                    encode_flagged(p.invert(w), 0)
                } else {
                    reject_element(n)
                };
                assert_eq!(s, StateVector::basis(li.clone(), &[("w", v), ("z", want)]).unwrap());
            }
        }
    }
}
