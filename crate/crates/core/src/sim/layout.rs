use crate::error::{ensure, Result};

/// A named, contiguous block of qubits. Bit `offset` holds the least
/// significant bit of the register value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub offset: usize,
    pub width: usize,
}

impl Register {
    #[inline]
    pub fn mask(&self) -> usize {
        ((1usize << self.width) - 1) << self.offset
    }

    #[inline]
    pub fn dim(&self) -> u64 {
        1u64 << self.width
    }

    #[inline]
    pub fn read(&self, index: usize) -> u64 {
        ((index >> self.offset) & ((1usize << self.width) - 1)) as u64
    }

    #[inline]
    pub fn write(&self, index: usize, value: u64) -> usize {
        (index & !self.mask()) | ((value as usize) << self.offset)
    }

    fn overlaps(&self, other: &Register) -> bool {
        self.offset < other.offset + other.width && other.offset < self.offset + self.width
    }
}

/// Ordered set of disjoint registers covering (part of) a qubit array.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    num_qubits: usize,
}

impl RegisterLayout {
    /// Packs registers back to back, first register at bit 0.
    pub fn packed(spec: &[(&str, usize)]) -> Result<Self> {
        let mut offset = 0;
        let mut regs = Vec::with_capacity(spec.len());
        for (name, width) in spec {
            regs.push((name.to_string(), offset, *width));
            offset += width;
        }
        Self::new(regs, offset)
    }

    /// Explicit placement. Rejects overlapping or out-of-range registers and
    /// duplicate names.
    pub fn new(registers: Vec<(String, usize, usize)>, num_qubits: usize) -> Result<Self> {
        ensure!(
            num_qubits <= super::MAX_QUBITS,
            "{num_qubits} qubits exceeds the dense-simulation cap of {}",
            super::MAX_QUBITS
        );
        let mut regs: Vec<Register> = Vec::with_capacity(registers.len());
        for (name, offset, width) in registers {
            ensure!(width > 0, "register {name} has zero width");
            ensure!(
                offset + width <= num_qubits,
                "register {name} [{offset}, {}) exceeds {num_qubits} qubits",
                offset + width
            );
            let reg = Register {
                name,
                offset,
                width,
            };
            for other in &regs {
                ensure!(other.name != reg.name, "duplicate register {}", reg.name);
                ensure!(
                    !other.overlaps(&reg),
                    "registers {} and {} overlap",
                    other.name,
                    reg.name
                );
            }
            regs.push(reg);
        }
        Ok(Self {
            registers: regs,
            num_qubits,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn get(&self, name: &str) -> Result<&Register> {
        match self.registers.iter().find(|r| r.name == name) {
            Some(r) => Ok(r),
            None => crate::error::contract!("no register named {name}"),
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.registers.iter().any(|r| r.name == name)
    }

    /// A copy with a new register placed on fresh qubits above the current ones.
    pub fn with_appended(&self, name: &str, width: usize) -> Result<Self> {
        let mut regs: Vec<(String, usize, usize)> = self
            .registers
            .iter()
            .map(|r| (r.name.clone(), r.offset, r.width))
            .collect();
        regs.push((name.to_string(), self.num_qubits, width));
        Self::new(regs, self.num_qubits + width)
    }

    /// Builds a basis index from register assignments; unnamed registers are 0.
    pub fn index_of(&self, values: &[(&str, u64)]) -> Result<usize> {
        let mut idx = 0usize;
        for (name, value) in values {
            let reg = self.get(name)?;
            ensure!(
                *value < reg.dim(),
                "value {value} does not fit register {name} of width {}",
                reg.width
            );
            idx = reg.write(idx, *value);
        }
        Ok(idx)
    }
}
