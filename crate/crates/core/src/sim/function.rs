use std::sync::Arc;

use crate::error::{ensure, Result};

/// A total function `{0,1}^domain_bits -> {0,1}^codomain_bits` stored as a
/// lookup table. Cloning shares the table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalFunctionTable {
    domain_bits: usize,
    codomain_bits: usize,
    table: Arc<[u64]>,
}

impl ClassicalFunctionTable {
    pub fn new(domain_bits: usize, codomain_bits: usize, table: Vec<u64>) -> Result<Self> {
        ensure!(domain_bits <= 24, "domain of {domain_bits} bits is too large");
        ensure!(codomain_bits <= 63, "codomain of {codomain_bits} bits is too large");
        ensure!(
            table.len() == 1usize << domain_bits,
            "table has {} entries, expected 2^{domain_bits}",
            table.len()
        );
        let limit = 1u64 << codomain_bits;
        if let Some((x, v)) = table.iter().enumerate().find(|(_, &v)| v >= limit) {
            crate::error::contract!("f({x}) = {v} does not fit in {codomain_bits} bits");
        }
        Ok(Self {
            domain_bits,
            codomain_bits,
            table: table.into(),
        })
    }

    pub fn from_fn(
        domain_bits: usize,
        codomain_bits: usize,
        f: impl Fn(u64) -> u64,
    ) -> Result<Self> {
        let table = (0..1u64 << domain_bits).map(f).collect();
        Self::new(domain_bits, codomain_bits, table)
    }

    pub fn zero(domain_bits: usize, codomain_bits: usize) -> Result<Self> {
        Self::from_fn(domain_bits, codomain_bits, |_| 0)
    }

    pub fn domain_bits(&self) -> usize {
        self.domain_bits
    }

    pub fn codomain_bits(&self) -> usize {
        self.codomain_bits
    }

    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        self.table[x as usize]
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    /// Inputs on which `self` and `other` disagree.
    pub fn differing_inputs(&self, other: &Self) -> Result<Vec<u64>> {
        ensure!(
            self.domain_bits == other.domain_bits && self.codomain_bits == other.codomain_bits,
            "functions have different shapes"
        );
        Ok((0..self.table.len() as u64)
            .filter(|&x| self.eval(x) != other.eval(x))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_outputs_that_overflow_codomain() {
        assert!(ClassicalFunctionTable::new(1, 1, vec![0, 2]).is_err());
        assert!(ClassicalFunctionTable::new(1, 2, vec![0, 2]).is_ok());
    }

    #[test]
    fn rejects_wrong_table_length() {
        assert!(ClassicalFunctionTable::new(2, 2, vec![0, 1, 2]).is_err());
    }

    #[test]
    fn differing_inputs_lists_disagreements() {
        let f = ClassicalFunctionTable::new(2, 2, vec![0, 1, 2, 3]).unwrap();
        let g = ClassicalFunctionTable::new(2, 2, vec![0, 3, 2, 1]).unwrap();
        assert_eq!(f.differing_inputs(&g).unwrap(), vec![1, 3]);
    }
}
