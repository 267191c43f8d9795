use num_complex::Complex64;

use super::{Advice, Inverter, InverterKind, Outcome, Resources};
use crate::error::Result;
use crate::oracle::{Permutation, QueryOracle};
use crate::rng::SharedRandomness;
use crate::sim::{RegisterLayout, StateVector};

/// Grover search for `w` with `pi(w) = y`, using forward queries only.
///
/// Each iteration computes `pi(w)` into a scratch register, flips the phase
/// where it equals `y`, uncomputes with a second query, and reflects `w`
/// about the uniform superposition. `T = 2k`, no advice.
#[derive(Clone, Debug)]
pub struct GroverInverter {
    pub iterations: u64,
}

pub fn grover_spi(iterations: u64) -> GroverInverter {
    GroverInverter { iterations }
}

impl Inverter for GroverInverter {
    fn name(&self) -> String {
        format!("grover-k{}", self.iterations)
    }

    fn kind(&self) -> InverterKind {
        InverterKind::Search
    }

    fn resources(&self, _n_bits: usize) -> Resources {
        Resources {
            advice_qubits: 0,
            queries: 2 * self.iterations,
            oracle_calls: 2 * self.iterations,
        }
    }

    fn phase0(&self, _perm: &Permutation, _r: SharedRandomness) -> Result<(Advice, u64)> {
        Ok((Advice::Empty, 0))
    }

    fn phase1(
        &self,
        oracle: &mut dyn QueryOracle,
        _advice: &Advice,
        _mu: u64,
        y: u64,
        _r: SharedRandomness,
    ) -> Result<Outcome> {
        let n = oracle.n_bits();
        let layout = RegisterLayout::packed(&[("w", n), ("z", n)])?;
        let mut s = StateVector::zero(layout);
        s.apply_hadamard("w")?;
        let minus = Complex64::new(-1.0, 0.0);
        for _ in 0..self.iterations {
            oracle.forward_query(&mut s, "w", "z")?;
            s.apply_phase_where("z", minus, |z| z == y)?;
            oracle.forward_query(&mut s, "w", "z")?;
            s.reflect_about_uniform("w")?;
        }
        let distribution = s
            .outcome_distribution("w")?
            .into_iter()
            .enumerate()
            .filter(|(_, p)| *p > 0.0)
            .map(|(v, p)| (v as u64, p))
            .collect();
        Ok(Outcome {
            distribution,
            logical_queries: 2 * self.iterations,
            final_state: Some(s),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::make_two_sided;

    #[test]
    fn four_elements_one_iteration_is_certain() {
        let p = Permutation::from_seed(2, 5);
        for x in 0..4 {
            let y = p.apply(x);
            let mut h = make_two_sided(p.clone(), y).unwrap().with_budget(2);
            let o = grover_spi(1)
                .phase1(&mut h, &Advice::Empty, 0, y, SharedRandomness(0))
                .unwrap();
            assert!((o.mass_of(x) - 1.0).abs() < 1e-12);
            assert_eq!(h.query_count(), 2);
        }
    }

    #[test]
    fn zero_iterations_is_uniform() {
        let p = Permutation::from_seed(3, 5);
        let mut h = make_two_sided(p.clone(), 0).unwrap();
        let o = grover_spi(0)
            .phase1(&mut h, &Advice::Empty, 0, 0, SharedRandomness(0))
            .unwrap();
        assert!((o.mass_of(p.invert(0)) - 0.125).abs() < 1e-12);
    }
}
