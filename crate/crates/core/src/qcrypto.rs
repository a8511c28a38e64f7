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

//! One-time pads and the signed-string derivation.
//!
//! Classical messages travel as length-prefixed bit fields: every field is a
//! 16-bit big-endian length followed by its bits.

use alloc::vec::Vec;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::pauli::{PauliString, Phase};
use crate::rng::RandomStream;
use crate::stabilizer::Syndrome;
use crate::state::StateVector;

const LENGTH_PREFIX_BITS: usize = 16;
const SEQ_NUM_BITS: usize = 64;

/// Shared classical key with a consumption pointer. Bits are handed out once.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassicalKey {
    bits: Bits,
    consumed: usize,
}

impl ClassicalKey {
    pub fn new(bits: Bits) -> Self {
        ClassicalKey { bits, consumed: 0 }
    }

    pub fn random(len: usize, rng: &mut RandomStream) -> Self {
        ClassicalKey::new(rng.bits(len))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn consumed(&self) -> usize {
        self.consumed
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.consumed
    }

    /// Hands out the next `n` unused bits.
    pub fn take(&mut self, n: usize) -> Result<Bits> {
        if n > self.remaining() {
            return Err(Error::KeyExhausted { needed: n, remaining: self.remaining() });
        }
        let out = self.bits.slice(self.consumed..self.consumed + n);
        self.consumed += n;
        Ok(out)
    }
}

/// A one-time-pad ciphertext tagged with the key offset it was padded at.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Ciphertext {
    pub offset: usize,
    pub bits: Bits,
}

pub fn otp_encrypt(key: &mut ClassicalKey, msg: &Bits) -> Result<Ciphertext> {
    let offset = key.consumed();
    let pad = key.take(msg.len())?;
    Ok(Ciphertext { offset, bits: msg.xor(&pad) })
}

/// The receiver's key copy must sit at the sender's offset; anything else
/// would mean reused or skipped key bits.
pub fn otp_decrypt(key: &mut ClassicalKey, cipher: &Ciphertext) -> Result<Bits> {
    if cipher.offset != key.consumed() {
        return Err(Error::Malformed(alloc::format!(
            "ciphertext padded at key offset {} but receiver is at {}",
            cipher.offset,
            key.consumed()
        )));
    }
    let pad = key.take(cipher.bits.len())?;
    Ok(cipher.bits.xor(&pad))
}

/// Quantum pad key: two bits per message qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QotpKey(Bits);

impl QotpKey {
    pub fn new(bits: Bits) -> Result<Self> {
        if bits.is_empty() || !bits.len().is_multiple_of(2) {
            return Err(Error::InvalidConfig(alloc::format!(
                "pad key needs an even nonzero length, got {}",
                bits.len()
            )));
        }
        Ok(QotpKey(bits))
    }

    pub fn random(n_msg: usize, rng: &mut RandomStream) -> Self {
        QotpKey(rng.bits(2 * n_msg))
    }

    pub fn n_msg(&self) -> usize {
        self.0.len() / 2
    }

    pub fn bits(&self) -> &Bits {
        &self.0
    }
}

/// `(X^{x_{2i}} on every qubit, Z^{x_{2i+1}} on every qubit)`.
fn pad_operators(n: usize, x: &QotpKey) -> Result<(PauliString, PauliString)> {
    let (mut xm, mut zm) = (0u64, 0u64);
    for q in 0..n {
        let bit = 1u64 << (n - 1 - q);
        if x.0[2 * q] {
            xm |= bit;
        }
        if x.0[2 * q + 1] {
            zm |= bit;
        }
    }
    Ok((PauliString::from_masks(n, Phase::PlusOne, xm, 0)?, PauliString::from_masks(n, Phase::PlusOne, 0, zm)?))
}

fn check_pad(state: &StateVector, x: &QotpKey) -> Result<()> {
    if state.num_qubits() != x.n_msg() {
        return Err(Error::DimensionMismatch { expected: x.n_msg(), actual: state.num_qubits() });
    }
    Ok(())
}

/// Per qubit `i`: `X^{x_{2i}}` then `Z^{x_{2i+1}}`.
pub fn qotp_encrypt(state: &StateVector, x: &QotpKey) -> Result<StateVector> {
    check_pad(state, x)?;
    let (px, pz) = pad_operators(state.num_qubits(), x)?;
    pz.apply(&px.apply(state)?)
}

pub fn qotp_decrypt(state: &StateVector, x: &QotpKey) -> Result<StateVector> {
    check_pad(state, x)?;
    let (px, pz) = pad_operators(state.num_qubits(), x)?;
    px.apply(&pz.apply(state)?)
}

/// The classical string Alice signs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DerivedX(Bits);

impl DerivedX {
    pub fn new(bits: Bits) -> Self {
        DerivedX(bits)
    }

    pub fn bits(&self) -> &Bits {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }
}

/// Leading syndrome bits used to mask the pad key: at most `2·n_msg`.
pub fn masking_bits(s: &Syndrome, n_msg: usize) -> Bits {
    s.bits().slice(0..s.len().min(2 * n_msg))
}

/// `X = (x[..|s|] ⊕ s) || x[|s|..]`.
pub fn derive_x(x: &QotpKey, s: &Bits) -> Result<DerivedX> {
    if s.len() > x.0.len() {
        return Err(Error::SyndromeTooLong { syndrome: s.len(), key: x.0.len() });
    }
    let head = x.0.slice(0..s.len()).xor(s);
    Ok(DerivedX(head.concat(&x.0.slice(s.len()..x.0.len()))))
}

/// Inverse of [`derive_x`] given the same mask.
pub fn recover_x(big_x: &DerivedX, s: &Bits) -> Result<QotpKey> {
    let key = QotpKey::new(big_x.0.clone())?;
    Ok(QotpKey(derive_x(&key, s)?.0))
}

/// Concatenates fields, each behind a 16-bit length.
pub fn encode_fields(fields: &[&Bits]) -> Result<Bits> {
    let mut out = Bits::new();
    for f in fields {
        if f.len() >> LENGTH_PREFIX_BITS != 0 {
            return Err(Error::Malformed(alloc::format!("field of {} bits overflows the length prefix", f.len())));
        }
        out.extend_from(&Bits::from_u64(f.len() as u64, LENGTH_PREFIX_BITS));
        out.extend_from(f);
    }
    Ok(out)
}

/// Splits exactly `count` fields; trailing bits are an error.
pub fn decode_fields(bits: &Bits, count: usize) -> Result<Vec<Bits>> {
    let mut pos = 0;
    let mut fields = Vec::with_capacity(count);
    for i in 0..count {
        if pos + LENGTH_PREFIX_BITS > bits.len() {
            return Err(Error::Malformed(alloc::format!("truncated length prefix of field {i}")));
        }
        let len = bits.slice(pos..pos + LENGTH_PREFIX_BITS).to_u64() as usize;
        pos += LENGTH_PREFIX_BITS;
        if pos + len > bits.len() {
            return Err(Error::Malformed(alloc::format!("field {i} claims {len} bits past the end")));
        }
        fields.push(bits.slice(pos..pos + len));
        pos += len;
    }
    if pos != bits.len() {
        return Err(Error::Malformed(alloc::format!("{} trailing bits", bits.len() - pos)));
    }
    Ok(fields)
}

fn expect_len(field: &Bits, len: usize, name: &str) -> Result<()> {
    if field.len() != len {
        return Err(Error::Malformed(alloc::format!("{name} has {} bits, expected {len}", field.len())));
    }
    Ok(())
}

/// Plaintext of C₁: Alice to Trent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct C1Plain {
    pub seq_num: u64,
    pub s: Syndrome,
    pub k_fam: Bits,
    pub x: QotpKey,
}

impl C1Plain {
    pub fn encoded_len(n_msg: usize, k_fam_bits: usize) -> usize {
        4 * LENGTH_PREFIX_BITS + SEQ_NUM_BITS + 4 * n_msg + k_fam_bits + 2 * n_msg
    }

    pub fn to_bits(&self) -> Result<Bits> {
        encode_fields(&[&Bits::from_u64(self.seq_num, SEQ_NUM_BITS), self.s.bits(), &self.k_fam, self.x.bits()])
    }

    pub fn from_bits(bits: &Bits) -> Result<Self> {
        let f = decode_fields(bits, 4)?;
        expect_len(&f[0], SEQ_NUM_BITS, "sequence number")?;
        Ok(C1Plain {
            seq_num: f[0].to_u64(),
            s: Syndrome::new(f[1].clone()),
            k_fam: f[2].clone(),
            x: QotpKey::new(f[3].clone())?,
        })
    }
}

/// Plaintext of C₂: Trent to Bob.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct C2Plain {
    pub k_fam: Bits,
    pub x: QotpKey,
}

impl C2Plain {
    pub fn encoded_len(n_msg: usize, k_fam_bits: usize) -> usize {
        2 * LENGTH_PREFIX_BITS + k_fam_bits + 2 * n_msg
    }

    pub fn to_bits(&self) -> Result<Bits> {
        encode_fields(&[&self.k_fam, self.x.bits()])
    }

    pub fn from_bits(bits: &Bits) -> Result<Self> {
        let f = decode_fields(bits, 2)?;
        Ok(C2Plain { k_fam: f[0].clone(), x: QotpKey::new(f[1].clone())? })
    }
}

/// Plaintext of C₃ (Bob's syndrome) and C₄ (Trent's syndrome).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyndromePlain(pub Syndrome);

impl SyndromePlain {
    pub fn encoded_len(n_msg: usize) -> usize {
        LENGTH_PREFIX_BITS + 4 * n_msg
    }

    pub fn to_bits(&self) -> Result<Bits> {
        encode_fields(&[self.0.bits()])
    }

    pub fn from_bits(bits: &Bits) -> Result<Self> {
        let f = decode_fields(bits, 1)?;
        Ok(SyndromePlain(Syndrome::new(f[0].clone())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DensityMatrix;
    use alloc::string::ToString;

    fn b(s: &str) -> Bits {
        s.parse().unwrap()
    }

    #[test]
    fn derive_x_example() {
        let x = QotpKey::new(b("101100")).unwrap();
        assert_eq!(derive_x(&x, &b("10")).unwrap().bits().to_string(), "001100");
        assert_eq!(derive_x(&x, &b("00")).unwrap().bits(), x.bits());
        let big = derive_x(&x, &b("0110")).unwrap();
        assert_eq!(recover_x(&big, &b("0110")).unwrap(), x);
        assert!(matches!(derive_x(&x, &b("1010101")), Err(Error::SyndromeTooLong { .. })));
    }

    #[test]
    fn derive_x_differs_exactly_where_mask_is_set() {
        let mut rng = RandomStream::new(1);
        for _ in 0..200 {
            let x = QotpKey::random(3, &mut rng);
            let len = rng.below(7);
            let s = rng.bits(len);
            let big = derive_x(&x, &s).unwrap();
            for i in 0..6 {
                let flipped = i < s.len() && s[i];
                assert_eq!(big.get(i) != x.bits()[i], flipped);
            }
        }
    }

    #[test]
    fn classical_pad_round_trip_and_discipline() {
        let mut rng = RandomStream::new(2);
        let key = ClassicalKey::random(20, &mut rng);
        let (mut alice, mut trent) = (key.clone(), key.clone());
        let zeros = Bits::zeros(8);
        let c = otp_encrypt(&mut alice, &zeros).unwrap();
        assert_eq!(c.bits, key.bits.slice(0..8));
        let msg = b("1011");
        let c2 = otp_encrypt(&mut alice, &msg).unwrap();
        assert_eq!(c2.offset, 8);
        // out of order delivery is refused
        assert!(matches!(otp_decrypt(&mut trent, &c2), Err(Error::Malformed(_))));
        assert_eq!(otp_decrypt(&mut trent, &c).unwrap(), zeros);
        assert_eq!(otp_decrypt(&mut trent, &c2).unwrap(), msg);
        assert!(matches!(
            otp_encrypt(&mut alice, &Bits::zeros(9)),
            Err(Error::KeyExhausted { needed: 9, remaining: 8 })
        ));
        assert_eq!(alice.remaining(), 8);
    }

    #[test]
    fn quantum_pad_round_trip() {
        let mut rng = RandomStream::new(3);
        for n in 1..=3 {
            let psi = StateVector::random(n, &mut rng).unwrap();
            let x = QotpKey::random(n, &mut rng);
            let enc = qotp_encrypt(&psi, &x).unwrap();
            assert!(qotp_decrypt(&enc, &x).unwrap().approx_eq_up_to_phase(&psi));
        }
        let plus = StateVector::plus(1).unwrap();
        let zero_key = QotpKey::new(b("00")).unwrap();
        assert_eq!(qotp_encrypt(&plus, &zero_key).unwrap(), plus);
        assert!(qotp_encrypt(&StateVector::zero(2).unwrap(), &zero_key).is_err());
    }

    #[test]
    fn wrong_pad_key_damages_the_state() {
        let psi = StateVector::random(2, &mut RandomStream::new(6)).unwrap();
        for k in 0..16u64 {
            let x = QotpKey::new(Bits::from_u64(k, 4)).unwrap();
            let enc = qotp_encrypt(&psi, &x).unwrap();
            for wrong in (0..16u64).filter(|&w| w != k) {
                let out = qotp_decrypt(&enc, &QotpKey::new(Bits::from_u64(wrong, 4)).unwrap()).unwrap();
                assert!(out.fidelity(&psi).unwrap() < 1.0 - 1e-6);
            }
        }
    }

    #[test]
    fn full_key_average_is_maximally_mixed() {
        let mut rng = RandomStream::new(4);
        for n in 1..=2 {
            for _ in 0..5 {
                let psi = StateVector::random(n, &mut rng).unwrap();
                let encrypted: Vec<StateVector> = (0..1u64 << (2 * n))
                    .map(|k| qotp_encrypt(&psi, &QotpKey::new(Bits::from_u64(k, 2 * n)).unwrap()).unwrap())
                    .collect();
                let avg = DensityMatrix::average_of(encrypted.iter()).unwrap();
                let dist = avg.trace_distance(&DensityMatrix::maximally_mixed(1 << n)).unwrap();
                assert!(dist <= 1e-10, "n={n}: {dist}");
            }
        }
    }

    #[test]
    fn message_layouts_round_trip() {
        let mut rng = RandomStream::new(5);
        let c1 = C1Plain {
            seq_num: 0xdead_beef,
            s: Syndrome::new(rng.bits(8)),
            k_fam: rng.bits(32),
            x: QotpKey::random(2, &mut rng),
        };
        let bits = c1.to_bits().unwrap();
        assert_eq!(bits.len(), C1Plain::encoded_len(2, 32));
        assert_eq!(bits.slice(0..16).to_u64(), 64);
        assert_eq!(C1Plain::from_bits(&bits).unwrap(), c1);
        let c2 = C2Plain { k_fam: c1.k_fam.clone(), x: c1.x.clone() };
        assert_eq!(c2.to_bits().unwrap().len(), C2Plain::encoded_len(2, 32));
        assert_eq!(C2Plain::from_bits(&c2.to_bits().unwrap()).unwrap(), c2);
        let c3 = SyndromePlain(c1.s.clone());
        assert_eq!(c3.to_bits().unwrap().to_string(), alloc::format!("0000000000001000{}", c1.s.bits()));
        let mut bad = bits.clone();
        bad.push(true);
        assert!(C1Plain::from_bits(&bad).is_err());
        assert!(C1Plain::from_bits(&bits.slice(0..40)).is_err());
    }
}
