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

//! Classical codes with a verified agreement bound, the quantum fingerprint
//! built on them, and the signer's key pairs.
//!
//! A code maps `w`-bit strings to `m = c_rate·w`-bit codewords such that two
//! distinct codewords agree in at most `delta·m` positions. The fingerprint of
//! `u` is the register-form state
//!
//! ```text
//! |f(u)⟩ = m^{-1/2} Σ_l |l⟩|E_l(u)⟩
//! ```
//!
//! whose overlap `⟨f(u)|f(v)⟩` is exactly the agreement fraction of the two
//! codewords. The phase form `m^{-1/2} Σ_l (-1)^{E_l(u)} |l⟩` is available via
//! [`FingerprintForm::Phase`]; its overlap is `(2a − m)/m` and can be negative.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::RngCore;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::state::StateVector;

/// Random restarts `build_code` makes before giving up.
pub const MAX_CODE_ATTEMPTS: usize = 64;
const LOCAL_SEARCH_STEPS: usize = 2048;
pub const MAX_INPUT_BITS: usize = 16;
pub const MAX_CODEWORD_BITS: usize = 128;
/// Pairwise agreement is checked by brute force only up to this input size
/// for codes that are not linear.
const MAX_PAIRWISE_INPUT_BITS: usize = 12;

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum FingerprintForm {
    /// Index and code bit in separate registers; overlap = agreements / m.
    #[default]
    Register,
    /// Code bit carried as a ±1 phase on the index register.
    Phase,
}

/// `E: F₂^w → F₂^m` as an explicit table, with its measured agreement bound.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeSpec {
    w: usize,
    c_rate: usize,
    m: usize,
    delta: f64,
    /// `codewords[u]`, position `l` at bit `m − 1 − l`.
    codewords: Vec<u128>,
}

/// Number of positions where two `m`-bit words agree.
fn agreements(a: u128, b: u128, m: usize) -> usize {
    m - (a ^ b).count_ones() as usize
}

/// Largest agreement count `a` with `a / m ≤ delta`.
fn floor_agreements(delta: f64, m: usize) -> usize {
    let mut a = (delta * m as f64) as usize;
    while a > 0 && a as f64 / m as f64 > delta {
        a -= 1;
    }
    while a < m && (a + 1) as f64 / m as f64 <= delta {
        a += 1;
    }
    a
}

fn linear_table(rows: &[u128]) -> Vec<u128> {
    let w = rows.len();
    let mut table = alloc::vec![0u128; 1 << w];
    for u in 1usize..(1 << w) {
        let low = u.trailing_zeros() as usize;
        // integer bit `low` is input position `w - 1 - low`
        table[u] = table[u & (u - 1)] ^ rows[w - 1 - low];
    }
    table
}

fn check_params(w: usize, c_rate: usize) -> Result<usize> {
    if w == 0 || w > MAX_INPUT_BITS {
        return Err(Error::InvalidCode(alloc::format!("w must be in 1..={MAX_INPUT_BITS}, got {w}")));
    }
    if c_rate < 2 {
        return Err(Error::InvalidCode(alloc::format!("c_rate must be at least 2, got {c_rate}")));
    }
    let m = c_rate * w;
    if m > MAX_CODEWORD_BITS {
        return Err(Error::InvalidCode(alloc::format!("codeword length {m} exceeds {MAX_CODEWORD_BITS}")));
    }
    Ok(m)
}

impl CodeSpec {
    /// Wraps an explicit table (`codewords[u]` for `u` in big-endian order)
    /// and measures its agreement bound exhaustively.
    pub fn from_table(w: usize, c_rate: usize, codewords: Vec<Bits>) -> Result<CodeSpec> {
        let m = check_params(w, c_rate)?;
        if codewords.len() != 1 << w {
            return Err(Error::InvalidCode(alloc::format!(
                "expected {} codewords, got {}",
                1usize << w,
                codewords.len()
            )));
        }
        if let Some(bad) = codewords.iter().find(|c| c.len() != m) {
            return Err(Error::InvalidCode(alloc::format!("codeword of {} bits, expected {m}", bad.len())));
        }
        let words: Vec<u128> = codewords.iter().map(Bits::to_u128).collect();
        let max_agree = max_agreement(w, m, &words)?;
        if max_agree == m {
            return Err(Error::InvalidCode(alloc::string::String::from("codewords are not distinct")));
        }
        Ok(CodeSpec { w, c_rate, m, delta: max_agree as f64 / m as f64, codewords: words })
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn c_rate(&self) -> usize {
        self.c_rate
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Largest agreement fraction between distinct codewords.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn codeword(&self, u: usize) -> Bits {
        Bits::from_u128(self.codewords[u], self.m)
    }

    pub fn codewords(&self) -> impl Iterator<Item = Bits> + '_ {
        (0..self.codewords.len()).map(|u| self.codeword(u))
    }

    /// `E(u)`.
    pub fn encode_classical(&self, u: &SecretKey) -> Result<Bits> {
        Ok(self.codeword(self.index_of(u)?))
    }

    fn index_of(&self, u: &SecretKey) -> Result<usize> {
        if u.0.len() != self.w {
            return Err(Error::DimensionMismatch { expected: self.w, actual: u.0.len() });
        }
        Ok(u.0.to_u64() as usize)
    }

    /// Qubits in a fingerprint state of this code.
    pub fn fingerprint_qubits(&self, form: FingerprintForm) -> usize {
        let index_qubits = ceil_log2(self.m).max(1);
        match form {
            FingerprintForm::Register => index_qubits + 1,
            FingerprintForm::Phase => index_qubits,
        }
    }

    /// The register-form fingerprint `|f(u)⟩`.
    pub fn fingerprint(&self, u: &SecretKey) -> Result<StateVector> {
        self.fingerprint_with_form(u, FingerprintForm::Register)
    }

    pub fn fingerprint_with_form(&self, u: &SecretKey, form: FingerprintForm) -> Result<StateVector> {
        let word = self.codewords[self.index_of(u)?];
        let q = self.fingerprint_qubits(form);
        let a = 1.0 / (self.m as f64).sqrt();
        let mut amps = alloc::vec![Complex64::new(0.0, 0.0); 1 << q];
        for l in 0..self.m {
            let bit = (word >> (self.m - 1 - l)) & 1;
            match form {
                FingerprintForm::Register => amps[(l << 1) | bit as usize] = Complex64::new(a, 0.0),
                FingerprintForm::Phase => amps[l] = Complex64::new(if bit == 1 { -a } else { a }, 0.0),
            }
        }
        StateVector::from_amplitudes(amps)
    }
}

/// `⌈log₂ m⌉` for `m ≥ 1`.
pub fn ceil_log2(m: usize) -> usize {
    assert!(m >= 1);
    (usize::BITS - (m - 1).leading_zeros()) as usize
}

fn max_agreement(w: usize, m: usize, words: &[u128]) -> Result<usize> {
    // Linear codes: agreement between distinct words is m minus the weight of
    // their (nonzero) sum, itself a codeword.
    let rows: Vec<u128> = (0..w).map(|j| words[1 << (w - 1 - j)]).collect();
    if words[0] == 0 && linear_table(&rows) == words {
        let min_weight = words[1..].iter().map(|c| c.count_ones() as usize).min().unwrap_or(m);
        return Ok(m - min_weight);
    }
    if w > MAX_PAIRWISE_INPUT_BITS {
        return Err(Error::InvalidCode(alloc::format!(
            "non-linear code with w={w} is too large for an exhaustive pairwise check"
        )));
    }
    let mut best = 0;
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            best = best.max(agreements(words[i], words[j], m));
        }
    }
    Ok(best)
}

/// Random linear code with exhaustively verified `delta ≤ target_delta`.
pub fn build_code(w: usize, c_rate: usize, target_delta: f64, rng: &mut RandomStream) -> Result<CodeSpec> {
    let m = check_params(w, c_rate)?;
    if !(target_delta > 0.0 && target_delta < 1.0) {
        return Err(Error::InvalidCode(alloc::format!("target_delta must lie in (0, 1), got {target_delta}")));
    }
    let mask = if m == 128 { u128::MAX } else { (1u128 << m) - 1 };
    let needed = m - floor_agreements(target_delta, m);
    // Griesmer: a binary [m, w, d] linear code needs m ≥ Σ_{i<w} ⌈d / 2^i⌉.
    let griesmer: usize = (0..w).map(|i| needed.div_ceil(1 << i)).sum();
    if griesmer > m {
        return Err(Error::CodeSearchFailed { w, c_rate, target_delta, attempts: 0 });
    }
    let score = |rows: &[u128]| {
        let table = linear_table(rows);
        let min = table[1..].iter().map(|c| c.count_ones() as usize).min().unwrap_or(m);
        let at_min = table[1..].iter().filter(|c| c.count_ones() as usize == min).count();
        ((min, usize::MAX - at_min), table)
    };
    for _ in 0..MAX_CODE_ATTEMPTS {
        let mut rows: Vec<u128> =
            (0..w).map(|_| ((rng.next_u64() as u128) << 64 | rng.next_u64() as u128) & mask).collect();
        let (mut best, mut table) = score(&rows);
        // Hill climb on single generator bits; pure sampling almost never
        // finds near-equidistant codes.
        for _ in 0..LOCAL_SEARCH_STEPS {
            if best.0 >= needed {
                break;
            }
            let (r, b) = (rng.below(w), rng.below(m));
            rows[r] ^= 1u128 << b;
            let (candidate, t) = score(&rows);
            if candidate >= best {
                best = candidate;
                table = t;
            } else {
                rows[r] ^= 1u128 << b;
            }
        }
        if best.0 >= needed && best.0 > 0 {
            let delta = (m - best.0) as f64 / m as f64;
            return Ok(CodeSpec { w, c_rate, m, delta, codewords: table });
        }
    }
    Err(Error::CodeSearchFailed { w, c_rate, target_delta, attempts: MAX_CODE_ATTEMPTS })
}

/// A secret string `u ∈ F₂^w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SecretKey(Bits);

impl SecretKey {
    pub fn new(bits: Bits) -> Self {
        SecretKey(bits)
    }

    pub fn random(w: usize, rng: &mut RandomStream) -> Self {
        SecretKey(rng.bits(w))
    }

    pub fn bits(&self) -> &Bits {
        &self.0
    }
}

/// The public half: `public[i][j] = |f(u_{i,j})⟩` for `i < 2·n_msg`.
#[derive(Clone, Debug, PartialEq)]
pub struct PublicKeys {
    states: Vec<[StateVector; 2]>,
}

impl PublicKeys {
    pub fn new(states: Vec<[StateVector; 2]>) -> Self {
        PublicKeys { states }
    }

    /// Number of signature positions, `2·n_msg`.
    pub fn positions(&self) -> usize {
        self.states.len()
    }

    pub fn len(&self) -> usize {
        2 * self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn get(&self, i: usize, j: bool) -> &StateVector {
        &self.states[i][j as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = &StateVector> {
        self.states.iter().flat_map(|pair| pair.iter())
    }
}

/// The secret half: `u_{i,j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SecretKeys {
    keys: Vec<[SecretKey; 2]>,
}

impl SecretKeys {
    pub fn get(&self, i: usize, j: bool) -> &SecretKey {
        &self.keys[i][j as usize]
    }

    pub fn positions(&self) -> usize {
        self.keys.len()
    }
}

/// The signer's `4·n_msg` pairs `(u_{i,j}, |f(u_{i,j})⟩)`.
#[derive(Clone, Debug, PartialEq)]
pub struct KeyPairSet {
    n_msg: usize,
    form: FingerprintForm,
    secret: SecretKeys,
    public: PublicKeys,
}

impl KeyPairSet {
    pub fn n_msg(&self) -> usize {
        self.n_msg
    }

    pub fn form(&self) -> FingerprintForm {
        self.form
    }

    pub fn len(&self) -> usize {
        self.public.len()
    }

    pub fn is_empty(&self) -> bool {
        self.public.is_empty()
    }

    pub fn public(&self) -> &PublicKeys {
        &self.public
    }

    pub fn secret(&self) -> &SecretKeys {
        &self.secret
    }

    pub fn into_parts(self) -> (SecretKeys, PublicKeys) {
        (self.secret, self.public)
    }
}

/// How the two strings of one signature position are drawn.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum KeySampling {
    /// Uniform, conditioned on `u_{i,0} ≠ u_{i,1}`. Equal halves would sign
    /// both bit values identically.
    #[default]
    DistinctPairs,
    /// Every string independently uniform; pairs collide with probability
    /// `2^{-w}`.
    Independent,
}

/// Draws `4·n_msg` secret strings and their fingerprints.
pub fn generate_keypairs(n_msg: usize, code: &CodeSpec, rng: &mut RandomStream) -> Result<KeyPairSet> {
    generate_keypairs_with_form(n_msg, code, FingerprintForm::Register, KeySampling::DistinctPairs, rng)
}

pub fn generate_keypairs_with_form(
    n_msg: usize,
    code: &CodeSpec,
    form: FingerprintForm,
    sampling: KeySampling,
    rng: &mut RandomStream,
) -> Result<KeyPairSet> {
    if n_msg == 0 {
        return Err(Error::InvalidConfig(alloc::string::String::from("n_msg must be at least 1")));
    }
    let mut keys = Vec::with_capacity(2 * n_msg);
    let mut states = Vec::with_capacity(2 * n_msg);
    for _ in 0..2 * n_msg {
        let first = SecretKey::random(code.w(), rng);
        let mut second = SecretKey::random(code.w(), rng);
        while sampling == KeySampling::DistinctPairs && second == first {
            second = SecretKey::random(code.w(), rng);
        }
        let pair = [first, second];
        states.push([code.fingerprint_with_form(&pair[0], form)?, code.fingerprint_with_form(&pair[1], form)?]);
        keys.push(pair);
    }
    Ok(KeyPairSet { n_msg, form, secret: SecretKeys { keys }, public: PublicKeys { states } })
}

#[cfg(feature = "serde")]
mod serde_impl {
    use super::*;
    use alloc::string::String;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        w: usize,
        c_rate: usize,
        m: usize,
        delta: f64,
        codewords: Vec<String>,
    }

    impl Serialize for CodeSpec {
        fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
            Repr {
                w: self.w,
                c_rate: self.c_rate,
                m: self.m,
                delta: self.delta,
                codewords: self.codewords().map(|c| c.to_hex()).collect(),
            }
            .serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for CodeSpec {
        fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
            use serde::de::Error as _;
            let r = Repr::deserialize(d)?;
            let words = r
                .codewords
                .iter()
                .map(|h| Bits::from_hex(h, r.m))
                .collect::<Result<Vec<_>>>()
                .map_err(D::Error::custom)?;
            let code = CodeSpec::from_table(r.w, r.c_rate, words).map_err(D::Error::custom)?;
            if code.m != r.m || (code.delta - r.delta).abs() > 1e-12 {
                return Err(D::Error::custom("recorded m/delta do not match the codeword table"));
            }
            Ok(code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn table(words: &[&str]) -> Vec<Bits> {
        words.iter().map(|w| w.parse().unwrap()).collect()
    }

    fn key(s: &str) -> SecretKey {
        SecretKey::new(s.parse().unwrap())
    }

    #[test]
    fn repetition_code_has_zero_delta() {
        let code = CodeSpec::from_table(1, 4, table(&["0000", "1111"])).unwrap();
        assert_eq!(code.delta(), 0.0);
        assert_eq!(code.encode_classical(&key("0")).unwrap().to_string(), "0000");
        let f0 = code.fingerprint(&key("0")).unwrap();
        let f1 = code.fingerprint(&key("1")).unwrap();
        assert_eq!(f0.num_qubits(), 3);
        assert_eq!(f0.inner_product(&f1).unwrap().norm(), 0.0);
        assert!((f0.inner_product(&f0).unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_agreement_code() {
        let code = CodeSpec::from_table(1, 4, table(&["0011", "0101"])).unwrap();
        assert_eq!(code.delta(), 0.5);
        let f0 = code.fingerprint(&key("0")).unwrap();
        let f1 = code.fingerprint(&key("1")).unwrap();
        assert!((f0.inner_product(&f1).unwrap().re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn phase_form_overlap_is_signed() {
        let code = CodeSpec::from_table(1, 4, table(&["0000", "1111"])).unwrap();
        let f0 = code.fingerprint_with_form(&key("0"), FingerprintForm::Phase).unwrap();
        let f1 = code.fingerprint_with_form(&key("1"), FingerprintForm::Phase).unwrap();
        assert_eq!(f0.num_qubits(), 2);
        assert!((f0.inner_product(&f1).unwrap().re + 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_validation() {
        assert!(CodeSpec::from_table(1, 4, table(&["0000", "0000"])).is_err());
        assert!(CodeSpec::from_table(1, 4, table(&["0000"])).is_err());
        assert!(CodeSpec::from_table(1, 4, table(&["000", "111"])).is_err());
        assert!(CodeSpec::from_table(1, 1, table(&["0", "1"])).is_err());
        let code = CodeSpec::from_table(1, 4, table(&["0000", "1111"])).unwrap();
        assert!(matches!(code.encode_classical(&key("01")), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn build_code_meets_target() {
        let mut rng = RandomStream::new(9);
        for (w, target) in [(1, 0.1), (4, 0.5), (8, 0.75), (8, 0.625), (6, 0.99)] {
            let code = build_code(w, 4, target, &mut rng).unwrap();
            assert!(code.delta() <= target);
            assert_eq!(code.m(), 4 * w);
        }
    }

    #[test]
    fn build_code_reports_infeasible_targets() {
        let mut rng = RandomStream::new(9);
        // Griesmer: a binary [32, 8] code cannot have minimum distance 16.
        match build_code(8, 4, 0.5, &mut rng) {
            Err(Error::CodeSearchFailed { w: 8, c_rate: 4, .. }) => {}
            other => panic!("expected failure, got {other:?}"),
        }
        assert!(build_code(0, 4, 0.5, &mut rng).is_err());
        assert!(build_code(4, 4, 1.0, &mut rng).is_err());
    }

    #[test]
    fn build_code_is_reproducible() {
        let a = build_code(6, 4, 0.75, &mut RandomStream::new(3)).unwrap();
        let b = build_code(6, 4, 0.75, &mut RandomStream::new(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn keypairs_have_expected_shape() {
        let mut rng = RandomStream::new(1);
        let code = build_code(4, 4, 0.5, &mut rng).unwrap();
        let set = generate_keypairs(1, &code, &mut RandomStream::new(5)).unwrap();
        assert_eq!(set.len(), 4);
        assert_eq!(set.public().positions(), 2);
        for i in 0..2 {
            for j in [false, true] {
                let u = set.secret().get(i, j);
                assert_eq!(set.public().get(i, j), &code.fingerprint(u).unwrap());
                assert!((set.public().get(i, j).norm_sqr() - 1.0).abs() < 1e-12);
            }
        }
        assert_eq!(set, generate_keypairs(1, &code, &mut RandomStream::new(5)).unwrap());
        assert!(generate_keypairs(0, &code, &mut rng).is_err());
    }

    #[test]
    fn distinct_pair_sampling_never_collides() {
        let code = build_code(1, 4, 0.5, &mut RandomStream::new(1)).unwrap();
        let mut rng = RandomStream::new(2);
        for _ in 0..50 {
            let set = generate_keypairs(2, &code, &mut rng).unwrap();
            assert!((0..4).all(|i| set.secret().get(i, false) != set.secret().get(i, true)));
        }
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(32), 5);
    }
}
