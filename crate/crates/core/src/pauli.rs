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

//! Pauli strings in symplectic form.
//!
//! A [`PauliString`] is `phase · σ_0 ⊗ σ_1 ⊗ … ⊗ σ_{n-1}` with each
//! `σ_q ∈ {I, X, Y, Z}`. The phase is stated relative to that Hermitian form,
//! so the string is Hermitian exactly when the phase is `±1`.
//!
//! Internally qubit `q` sits at mask bit `n - 1 - q`, matching the big-endian
//! basis indices of [`StateVector`], so applying a string to a basis state is
//! an XOR and a parity.

use alloc::string::String;
use core::fmt;
use core::ops::Mul;
use core::str::FromStr;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::state::StateVector;

/// Powers of `i`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    /// `i^k`.
    pub fn from_exponent(k: u8) -> Phase {
        match k & 3 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn exponent(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    pub fn is_real(self) -> bool {
        matches!(self, Phase::PlusOne | Phase::MinusOne)
    }

    fn as_str(self) -> &'static str {
        match self {
            Phase::PlusOne => "+1",
            Phase::PlusI => "+i",
            Phase::MinusOne => "-1",
            Phase::MinusI => "-i",
        }
    }
}

impl Mul for Phase {
    type Output = Phase;

    // Phases are powers of i, so products add exponents.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_exponent(self.exponent() + rhs.exponent())
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Phase> {
        match s {
            "+1" | "+" | "" => Ok(Phase::PlusOne),
            "+i" | "i" => Ok(Phase::PlusI),
            "-1" | "-" => Ok(Phase::MinusOne),
            "-i" => Ok(Phase::MinusI),
            other => Err(Error::Malformed(alloc::format!("bad phase {other:?}"))),
        }
    }
}

/// Single-qubit Pauli letter.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn xz(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_xz(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Largest register a [`PauliString`] can describe.
pub const MAX_PAULI_QUBITS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    num_qubits: usize,
    phase: Phase,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(num_qubits: usize) -> Self {
        assert!(num_qubits <= MAX_PAULI_QUBITS, "PauliString supports at most 64 qubits");
        PauliString { num_qubits, phase: Phase::PlusOne, x: 0, z: 0 }
    }

    /// `pauli` on qubit `q`, identity elsewhere.
    pub fn single(num_qubits: usize, q: usize, pauli: Pauli) -> Self {
        let mut p = Self::identity(num_qubits);
        p.set(q, pauli);
        p
    }

    /// Raw constructor from masks in basis-index layout (qubit `q` at bit
    /// `n - 1 - q`).
    pub fn from_masks(num_qubits: usize, phase: Phase, x: u64, z: u64) -> Result<Self> {
        if num_qubits > MAX_PAULI_QUBITS {
            return Err(Error::TooManyQubits { requested: num_qubits, limit: MAX_PAULI_QUBITS });
        }
        let valid = if num_qubits == 64 { u64::MAX } else { (1u64 << num_qubits) - 1 };
        if (x | z) & !valid != 0 {
            return Err(Error::Malformed(alloc::format!("mask exceeds {num_qubits} qubits")));
        }
        Ok(PauliString { num_qubits, phase, x, z })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    fn bit(&self, q: usize) -> u64 {
        1u64 << (self.num_qubits - 1 - q)
    }

    pub fn get(&self, q: usize) -> Pauli {
        let b = self.bit(q);
        Pauli::from_xz(self.x & b != 0, self.z & b != 0)
    }

    pub fn set(&mut self, q: usize, pauli: Pauli) {
        let b = self.bit(q);
        let (x, z) = pauli.xz();
        self.x = if x { self.x | b } else { self.x & !b };
        self.z = if z { self.z | b } else { self.z & !b };
    }

    pub fn x_bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.num_qubits).map(move |q| self.x & self.bit(q) != 0)
    }

    pub fn z_bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.num_qubits).map(move |q| self.z & self.bit(q) != 0)
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Symplectic inner product: 1 when the strings anticommute.
    pub fn symplectic(&self, other: &PauliString) -> u8 {
        debug_assert_eq!(self.num_qubits, other.num_qubits);
        (((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) & 1) as u8
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        self.symplectic(other) == 0
    }

    /// Same operator up to phase.
    pub fn same_support(&self, other: &PauliString) -> bool {
        self.num_qubits == other.num_qubits && self.x == other.x && self.z == other.z
    }

    /// Product `self · other`.
    pub fn try_mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, actual: other.num_qubits });
        }
        // Work in X^x Z^z form where Y = i·XZ, then convert back.
        let a = self.phase.exponent() as u32 + self.y_count();
        let b = other.phase.exponent() as u32 + other.y_count();
        let swap = 2 * (self.z & other.x).count_ones();
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let y = (x & z).count_ones();
        let k = (a + b + swap + 4 * 64 - y) % 4;
        Ok(PauliString { num_qubits: self.num_qubits, phase: Phase::from_exponent(k as u8), x, z })
    }

    /// This string placed at qubits `offset..offset + n` of a `total`-qubit
    /// register, identity elsewhere.
    pub fn embed(&self, total: usize, offset: usize) -> PauliString {
        assert!(offset + self.num_qubits <= total && total <= MAX_PAULI_QUBITS);
        let shift = total - offset - self.num_qubits;
        PauliString { num_qubits: total, phase: self.phase, x: self.x << shift, z: self.z << shift }
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        let total = self.num_qubits + other.num_qubits;
        assert!(total <= MAX_PAULI_QUBITS);
        PauliString {
            num_qubits: total,
            phase: self.phase * other.phase,
            x: (self.x << other.num_qubits) | other.x,
            z: (self.z << other.num_qubits) | other.z,
        }
    }

    /// Returns `self · state`.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if self.num_qubits != state.num_qubits() {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, actual: state.num_qubits() });
        }
        let amps = state.amplitudes();
        let global = Phase::from_exponent(self.phase.exponent() + (self.y_count() % 4) as u8).to_complex();
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); amps.len()];
        for (b, &a) in amps.iter().enumerate() {
            // X^x Z^z |b⟩ = (-1)^{b·z} |b ⊕ x⟩
            let sign = if (b as u64 & self.z).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
            out[b ^ self.x as usize] = a * global * sign;
        }
        Ok(StateVector::from_raw(state.num_qubits(), out))
    }

    /// Projects `state` onto the `(1 + sign·P)/2` eigenspace without
    /// normalizing. `sign` is `+1.0` or `-1.0`.
    pub(crate) fn project(&self, state: &StateVector, sign: f64) -> Result<alloc::vec::Vec<Complex64>> {
        let flipped = self.apply(state)?;
        Ok(state.amplitudes().iter().zip(flipped.amplitudes()).map(|(a, b)| (a + b * sign) * 0.5).collect())
    }

    /// `⟨ψ|P|ψ⟩`, real for Hermitian `P`.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        if !self.is_hermitian() {
            return Err(Error::NonHermitian(self.phase));
        }
        Ok(state.inner_product(&self.apply(state)?)?.re)
    }

    /// Projective measurement of this Hermitian Pauli.
    ///
    /// Returns the eigenvalue (`+1` or `-1`) and the normalized post-state.
    pub fn measure(&self, state: &StateVector, rng: &mut RandomStream) -> Result<(i8, StateVector)> {
        if !self.is_hermitian() {
            return Err(Error::NonHermitian(self.phase));
        }
        let plus = self.project(state, 1.0)?;
        let p_plus: f64 = plus.iter().map(|a| a.norm_sqr()).sum();
        let outcome_plus = if p_plus >= 1.0 - crate::AMPLITUDE_TOLERANCE {
            true
        } else if p_plus <= crate::AMPLITUDE_TOLERANCE {
            false
        } else {
            rng.bernoulli(p_plus)
        };
        let (eigenvalue, mut amps, p) =
            if outcome_plus { (1, plus, p_plus) } else { (-1, self.project(state, -1.0)?, 1.0 - p_plus) };
        let norm = p.sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        let post = StateVector::normalized(amps)?;
        Ok((eigenvalue, post))
    }
}

impl Mul for &PauliString {
    type Output = PauliString;

    fn mul(self, rhs: &PauliString) -> PauliString {
        self.try_mul(rhs).expect("Pauli product of unequal register sizes")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase {
            Phase::PlusOne => {}
            Phase::MinusOne => f.write_str("-")?,
            Phase::PlusI => f.write_str("i")?,
            Phase::MinusI => f.write_str("-i")?,
        }
        for q in 0..self.num_qubits {
            write!(f, "{}", self.get(q).letter())?;
        }
        Ok(())
    }
}

/// Parses strings such as `"XZZXI"`, `"-IXZZX"` or `"+iY"`.
impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<PauliString> {
        let body_start = s.find(|c: char| "IXYZ".contains(c)).unwrap_or(s.len());
        let phase: Phase = s[..body_start].parse()?;
        let body = &s[body_start..];
        let mut p = PauliString::identity(body.chars().count());
        for (q, ch) in body.chars().enumerate() {
            let pauli = match ch {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(Error::Malformed(alloc::format!("bad Pauli letter {other:?}"))),
            };
            p.set(q, pauli);
        }
        Ok(p.with_phase(phase))
    }
}

impl PauliString {
    /// Hex of the X and Z masks, big-endian in qubit order.
    pub fn to_hex_parts(&self) -> (String, String) {
        (
            crate::bits::Bits::from_u64(self.x, self.num_qubits).to_hex(),
            crate::bits::Bits::from_u64(self.z, self.num_qubits).to_hex(),
        )
    }
}

#[cfg(feature = "serde")]
mod serde_impl {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        num_qubits: usize,
        phase: String,
        x: String,
        z: String,
    }

    impl Serialize for PauliString {
        fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
            let (x, z) = self.to_hex_parts();
            Repr { num_qubits: self.num_qubits, phase: String::from(self.phase.as_str()), x, z }.serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for PauliString {
        fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
            use serde::de::Error as _;
            let r = Repr::deserialize(d)?;
            let x = crate::bits::Bits::from_hex(&r.x, r.num_qubits).map_err(D::Error::custom)?;
            let z = crate::bits::Bits::from_hex(&r.z, r.num_qubits).map_err(D::Error::custom)?;
            let phase: Phase = r.phase.parse().map_err(D::Error::custom)?;
            PauliString::from_masks(r.num_qubits, phase, x.to_u64(), z.to_u64()).map_err(D::Error::custom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_qubit_actions() {
        let zero = StateVector::basis(1, 0).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        assert_eq!(p("X").apply(&zero).unwrap(), one);
        assert_eq!(p("Y").apply(&zero).unwrap().amplitudes(), &[c(0.0, 0.0), c(0.0, 1.0)]);
        let plus = StateVector::plus(1).unwrap();
        let minus = p("Z").apply(&plus).unwrap();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert!((minus.amplitudes()[0] - c(h, 0.0)).norm() < 1e-12);
        assert!((minus.amplitudes()[1] - c(-h, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        let s = p("XI").apply(&StateVector::zero(2).unwrap()).unwrap();
        assert_eq!(s, StateVector::basis(2, 0b10).unwrap());
    }

    #[test]
    fn products_follow_the_pauli_algebra() {
        assert_eq!(&p("X") * &p("Y"), p("iZ"));
        assert_eq!(&p("Y") * &p("X"), p("-iZ"));
        assert_eq!(&p("Z") * &p("X"), p("iY"));
        assert_eq!(&p("Y") * &p("Y"), p("I"));
        assert_eq!(&p("XZ") * &p("ZX"), p("YY"));
    }

    #[test]
    fn display_round_trip() {
        for s in ["XZZXI", "-IXZZX", "iY", "-iXYZ"] {
            assert_eq!(p(s).to_string(), s);
        }
    }

    #[test]
    fn measuring_z_on_zero_is_deterministic() {
        let mut rng = RandomStream::new(1);
        let zero = StateVector::zero(1).unwrap();
        for _ in 0..20 {
            let (e, post) = p("Z").measure(&zero, &mut rng).unwrap();
            assert_eq!(e, 1);
            assert_eq!(post, zero);
        }
    }

    #[test]
    fn measuring_x_on_zero_is_fair() {
        let mut rng = RandomStream::new(2);
        let zero = StateVector::zero(1).unwrap();
        let n = 10_000;
        let plus = (0..n).filter(|_| p("X").measure(&zero, &mut rng).unwrap().0 == 1).count();
        let sigma = (0.25 / n as f64).sqrt();
        assert!((plus as f64 / n as f64 - 0.5).abs() < 3.0 * sigma);
    }

    #[test]
    fn repeated_measurement_is_stable() {
        let mut rng = RandomStream::new(5);
        let psi = StateVector::random(3, &mut rng).unwrap();
        let g = p("XYZ");
        let (e1, post) = g.measure(&psi, &mut rng).unwrap();
        for _ in 0..10 {
            let (e2, again) = g.measure(&post, &mut rng).unwrap();
            assert_eq!(e1, e2);
            assert!(again.approx_eq_up_to_phase(&post));
        }
    }

    #[test]
    fn non_hermitian_measurement_is_rejected() {
        let mut rng = RandomStream::new(0);
        let zero = StateVector::zero(1).unwrap();
        assert!(matches!(p("iZ").measure(&zero, &mut rng), Err(Error::NonHermitian(Phase::PlusI))));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        assert!(p("XX").apply(&StateVector::zero(1).unwrap()).is_err());
        assert!(p("XX").try_mul(&p("X")).is_err());
    }

    #[test]
    fn embed_and_tensor_agree() {
        let a = p("XZ");
        let b = p("Y");
        assert_eq!(a.tensor(&b), &a.embed(3, 0) * &b.embed(3, 2));
        assert_eq!(b.embed(3, 1).to_string(), "IYI");
    }
}
