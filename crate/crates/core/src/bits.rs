// Copyright 2026 The qsig Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Owned bit strings for keys, syndromes and ciphertexts.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{BitXor, Index};
use core::str::FromStr;

use crate::error::{Error, Result};

/// A sequence of bits, first bit first.
///
/// Conversions to and from integers are big-endian: the first bit is the
/// most significant.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new() -> Self {
        Bits(Vec::new())
    }

    pub fn zeros(len: usize) -> Self {
        Bits(alloc::vec![false; len])
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        Bits(bits)
    }

    /// The low `len` bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64, "from_u64 supports at most 64 bits");
        Bits((0..len).map(|i| (value >> (len - 1 - i)) & 1 == 1).collect())
    }

    pub fn from_u128(value: u128, len: usize) -> Self {
        assert!(len <= 128, "from_u128 supports at most 128 bits");
        Bits((0..len).map(|i| (value >> (len - 1 - i)) & 1 == 1).collect())
    }

    pub fn to_u64(&self) -> u64 {
        assert!(self.len() <= 64, "to_u64 on {} bits", self.len());
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn to_u128(&self) -> u128 {
        assert!(self.len() <= 128, "to_u128 on {} bits", self.len());
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as u128)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.0.get(i).copied()
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.0[i] = value;
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, other: &Bits) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| !b)
    }

    /// Bits `range`, copied.
    pub fn slice(&self, range: core::ops::Range<usize>) -> Bits {
        Bits(self.0[range].to_vec())
    }

    pub fn concat(&self, other: &Bits) -> Bits {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    /// Bitwise XOR; panics on unequal lengths.
    pub fn xor(&self, other: &Bits) -> Bits {
        assert_eq!(self.len(), other.len(), "xor of unequal-length bit strings");
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect())
    }

    /// Lower-case hex, left-padded so the digit count is `ceil(len / 4)`.
    pub fn to_hex(&self) -> String {
        let pad = (4 - self.len() % 4) % 4;
        let padded: Vec<bool> = core::iter::repeat_n(false, pad).chain(self.iter()).collect();
        padded
            .chunks(4)
            .map(|nib| {
                let v = nib.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
                core::char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    /// Inverse of [`Bits::to_hex`] for a known bit length.
    pub fn from_hex(hex: &str, len: usize) -> Result<Bits> {
        if hex.len() != len.div_ceil(4) {
            return Err(Error::Malformed(alloc::format!(
                "hex string of {} digits cannot hold exactly {len} bits",
                hex.len()
            )));
        }
        let mut all = Vec::with_capacity(hex.len() * 4);
        for ch in hex.chars() {
            let v = ch.to_digit(16).ok_or_else(|| Error::Malformed(alloc::format!("bad hex digit {ch:?}")))?;
            all.extend((0..4).rev().map(|i| (v >> i) & 1 == 1));
        }
        let pad = all.len() - len;
        if all[..pad].iter().any(|&b| b) {
            return Err(Error::Malformed(alloc::format!("hex value exceeds {len} bits")));
        }
        Ok(Bits(all[pad..].to_vec()))
    }
}

impl Index<usize> for Bits {
    type Output = bool;

    fn index(&self, i: usize) -> &bool {
        &self.0[i]
    }
}

impl BitXor for &Bits {
    type Output = Bits;

    fn bitxor(self, rhs: &Bits) -> Bits {
        self.xor(rhs)
    }
}

impl FromIterator<bool> for Bits {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Bits(iter.into_iter().collect())
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({self})")
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Bits> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Malformed(alloc::format!("bad bit character {other:?}"))),
            })
            .collect()
    }
}

// Serialized as a string of '0'/'1' characters.
#[cfg(feature = "serde")]
impl serde::Serialize for Bits {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for Bits {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = <String as serde::Deserialize>::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn integer_round_trip_is_big_endian() {
        let b = Bits::from_u64(0b1011, 6);
        assert_eq!(b.to_string(), "001011");
        assert_eq!(b.to_u64(), 0b1011);
    }

    #[test]
    fn hex_pads_on_the_left() {
        let b: Bits = "101100".parse().unwrap();
        assert_eq!(b.to_hex(), "2c");
        assert_eq!(Bits::from_hex("2c", 6).unwrap(), b);
        assert!(Bits::from_hex("4c", 6).is_err());
        assert!(Bits::from_hex("2c", 9).is_err());
    }

    #[test]
    fn xor_and_slices() {
        let a: Bits = "1100".parse().unwrap();
        let b: Bits = "1010".parse().unwrap();
        assert_eq!((&a ^ &b).to_string(), "0110");
        assert_eq!(a.slice(1..3).to_string(), "10");
        assert_eq!(a.concat(&b).to_string(), "11001010");
    }
}
