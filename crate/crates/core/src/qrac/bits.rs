use num_bigint::BigUint;

use crate::error::{Error, Result};

#[derive(Default)]
pub(super) struct BitWriter {
    bits: Vec<bool>,
}

impl BitWriter {
    pub fn push(&mut self, b: bool) {
        self.bits.push(b);
    }

    pub fn extend(&mut self, bits: &[bool]) {
        self.bits.extend_from_slice(bits);
    }

    pub fn push_u64(&mut self, v: u64, width: u64) -> Result<()> {
        self.push_big(&BigUint::from(v), width)
    }

    /// `v` big-endian in exactly `width` bits.
    pub fn push_big(&mut self, v: &BigUint, width: u64) -> Result<()> {
        if v.bits() > width {
            return Err(Error::Contract(format!("value needs {} bits, field has {width}", v.bits())));
        }
        self.bits.extend((0..width).rev().map(|i| v.bit(i)));
        Ok(())
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }
}

pub(super) struct BitReader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a [bool]) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn take(&mut self, k: usize) -> Result<&'a [bool]> {
        if self.pos + k > self.bits.len() {
            return Err(Error::Decode(format!(
                "truncated encoding: need {k} bits at offset {}, have {}",
                self.pos,
                self.bits.len() - self.pos
            )));
        }
        let out = &self.bits[self.pos..self.pos + k];
        self.pos += k;
        Ok(out)
    }

    pub fn bit(&mut self) -> Result<bool> {
        Ok(self.take(1)?[0])
    }

    pub fn big(&mut self, width: u64) -> Result<BigUint> {
        let mut v = BigUint::default();
        for &b in self.take(width as usize)? {
            v <<= 1u32;
            if b {
                v += 1u32;
            }
        }
        Ok(v)
    }

    pub fn u64(&mut self, width: u64) -> Result<u64> {
        self.big(width)?
            .try_into()
            .map_err(|_| Error::Decode("field does not fit 64 bits".into()))
    }

    pub fn remaining(&self) -> &'a [bool] {
        &self.bits[self.pos..]
    }
}

pub(super) fn pack(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i))))
        .collect()
}

pub(super) fn unpack(bytes: &[u8]) -> Vec<bool> {
    bytes
        .iter()
        .flat_map(|&byte| (0..8).rev().map(move |i| (byte >> i) & 1 == 1))
        .collect()
}
