//! Explicit matrices of oracle actions, for unitarity checks at small `n`.

use num_complex::Complex64;

use super::{Direction, QueryOracle};
use crate::error::{ensure, Result};
use crate::sim::{RegisterLayout, StateVector};

/// A dense square matrix, column-major: `columns[i]` is `U|i>`.
#[derive(Clone, Debug)]
pub struct OracleMatrix {
    pub dim: usize,
    pub columns: Vec<Vec<Complex64>>,
}

impl OracleMatrix {
    /// `max |(U^dagger U - I)_{ij}|`.
    pub fn unitarity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let dot: Complex64 = self.columns[i]
                    .iter()
                    .zip(&self.columns[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - want).norm());
            }
        }
        worst
    }

    /// The basis permutation this matrix realizes, if it is one exactly.
    pub fn as_basis_permutation(&self) -> Option<Vec<usize>> {
        self.columns
            .iter()
            .map(|col| {
                let mut hits = col.iter().enumerate().filter(|(_, a)| a.norm() != 0.0);
                match (hits.next(), hits.next()) {
                    (Some((r, a)), None) if *a == Complex64::new(1.0, 0.0) => Some(r),
                    _ => None,
                }
            })
            .collect()
    }
}

/// Materializes one direction of `oracle` on a `(in, out)` register pair by
/// querying every basis state. Spends `dim` queries on the oracle's meter.
pub fn materialize(oracle: &mut dyn QueryOracle, direction: Direction) -> Result<OracleMatrix> {
    let width = match direction {
        Direction::Forward => oracle.n_bits(),
        Direction::Inverse => oracle.n_bits() + 1,
    };
    ensure!(2 * width <= 12, "refusing to materialize a {}-qubit oracle", 2 * width);
    let layout = RegisterLayout::packed(&[("in", width), ("out", width)])?;
    let dim = 1usize << (2 * width);
    let mut columns = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[i] = Complex64::new(1.0, 0.0);
        let mut s = StateVector::from_amplitudes(layout.clone(), amps)?;
        oracle.query(direction, &mut s, "in", "out")?;
        columns.push(s.amplitudes().to_vec());
    }
    Ok(OracleMatrix { dim, columns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{make_two_sided, Permutation};

    #[test]
    fn two_sided_pair_is_unitary() {
        let mut h = make_two_sided(Permutation::from_seed(3, 1), 2).unwrap();
        for d in [Direction::Forward, Direction::Inverse] {
            let m = materialize(&mut h, d).unwrap();
            assert!(m.unitarity_error() < 1e-10);
            assert!(m.as_basis_permutation().is_some());
        }
    }

    #[test]
    fn non_unitary_matrix_detected() {
        let m = OracleMatrix {
            dim: 2,
            columns: vec![
                vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            ],
        };
        assert!(m.unitarity_error() > 0.5);
    }
}
