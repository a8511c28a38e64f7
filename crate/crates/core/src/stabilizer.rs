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

//! Stabilizer codes and the keyed code family.
//!
//! The base code is the perfect `[[5,1,3]]` code. Family members are derived
//! from it by a keyed qubit permutation followed by a local Clifford frame on
//! every qubit; both preserve weights and commutation, so every member is
//! again a nondegenerate distance-3 code.
//!
//! Multi-qubit messages are encoded blockwise, one code block per logical
//! qubit, through [`BlockCode`]. A block syndrome is the concatenation of the
//! per-block syndromes, block 0 first.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, Phase};
use crate::rng::RandomStream;
use crate::state::{StateVector, DEFAULT_MAX_QUBITS};

/// Length of a code-family key in bits.
pub const FAMILY_KEY_BITS: usize = 32;

/// Generator expectation below `1 - this` counts as a residual error.
const CODESPACE_TOLERANCE: f64 = 1e-9;

/// Generator outcomes: bit `i` is set when generator `i` measured `-1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Syndrome(Bits);

impl Syndrome {
    pub fn new(bits: Bits) -> Self {
        Syndrome(bits)
    }

    pub fn zero(len: usize) -> Self {
        Syndrome(Bits::zeros(len))
    }

    pub fn from_index(index: usize, len: usize) -> Self {
        Syndrome(Bits::from_u64(index as u64, len))
    }

    pub fn index(&self) -> usize {
        self.0.to_u64() as usize
    }

    pub fn bits(&self) -> &Bits {
        &self.0
    }

    pub fn into_bits(self) -> Bits {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn xor(&self, other: &Syndrome) -> Syndrome {
        Syndrome(self.0.xor(&other.0))
    }
}

/// Selects a member of the code family. Every bit string is valid.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CodeFamilyKey(Bits);

impl CodeFamilyKey {
    pub fn new(bits: Bits) -> Self {
        CodeFamilyKey(bits)
    }

    pub fn random(rng: &mut RandomStream) -> Self {
        CodeFamilyKey(rng.bits(FAMILY_KEY_BITS))
    }

    pub fn bits(&self) -> &Bits {
        &self.0
    }

    fn seed(&self) -> u64 {
        // fold into 64 bits
        self.0
            .as_slice()
            .chunks(64)
            .fold(0u64, |acc, chunk| acc.rotate_left(7) ^ Bits::from_bools(chunk.to_vec()).to_u64())
            ^ (self.0.len() as u64).rotate_left(56)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerCode {
    n_phys: usize,
    k_log: usize,
    distance: usize,
    generators: Vec<PauliString>,
    /// `(X_L, Z_L)` per logical qubit.
    logical_ops: Vec<(PauliString, PauliString)>,
    /// Indexed by syndrome value (generator 0 is the most significant bit).
    coset_reps: Vec<PauliString>,
    /// `|b_L⟩` for every logical basis index `b`; the encoding isometry.
    logical_basis: Vec<StateVector>,
}

/// All Pauli strings on `n` qubits ordered by weight, then by masks.
fn paulis_by_weight(n: usize) -> Vec<PauliString> {
    let mut all: Vec<PauliString> = (0..1u64 << n)
        .flat_map(|x| (0..1u64 << n).map(move |z| (x, z)))
        .map(|(x, z)| PauliString::from_masks(n, Phase::PlusOne, x, z).expect("mask within range"))
        .collect();
    all.sort_by_key(|p| (p.weight(), p.x_mask(), p.z_mask()));
    all
}

fn gf2_rank(mut rows: Vec<u128>) -> usize {
    let mut rank = 0;
    for bit in (0..128).rev() {
        let pivot = 1u128 << bit;
        if let Some(pos) = rows[rank..].iter().position(|r| r & pivot != 0) {
            rows.swap(rank, rank + pos);
            let p = rows[rank];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && *r & pivot != 0 {
                    *r ^= p;
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
    }
    rank
}

fn symplectic_row(p: &PauliString) -> u128 {
    ((p.x_mask() as u128) << 64) | p.z_mask() as u128
}

impl StabilizerCode {
    /// Validates the generators and logical operators, then computes the
    /// minimal-weight coset table, the distance and the encoder.
    pub fn new(generators: Vec<PauliString>, logical_ops: Vec<(PauliString, PauliString)>) -> Result<Self> {
        let n_phys = generators.first().map(PauliString::num_qubits).unwrap_or(0);
        let k_log = logical_ops.len();
        if n_phys == 0 || generators.len() + k_log != n_phys {
            return Err(Error::InvalidCode(alloc::format!(
                "{} generators and {} logical qubits do not fit {} physical qubits",
                generators.len(),
                k_log,
                n_phys
            )));
        }
        if n_phys > 10 {
            return Err(Error::InvalidCode(alloc::format!("{n_phys} physical qubits is beyond desk scale")));
        }
        let r = generators.len();
        let mut reps: Vec<Option<PauliString>> = alloc::vec![None; 1 << r];
        let mut filled = 0;
        let mut code = StabilizerCode {
            n_phys,
            k_log,
            distance: 0,
            generators,
            logical_ops,
            coset_reps: Vec::new(),
            logical_basis: Vec::new(),
        };
        code.check_algebra()?;
        for p in paulis_by_weight(n_phys) {
            let s = code.syndrome_index(&p);
            if reps[s].is_none() {
                reps[s] = Some(p);
                filled += 1;
                if filled == reps.len() {
                    break;
                }
            }
        }
        code.coset_reps = reps.into_iter().map(|r| r.expect("every syndrome is reachable")).collect();
        code.distance = code.compute_distance();
        code.logical_basis = code.compute_logical_basis()?;
        Ok(code)
    }

    /// Assembles a code without recomputing or checking the coset table.
    /// Used to inject faults into otherwise valid codes.
    pub fn from_parts_unchecked(
        distance: usize,
        generators: Vec<PauliString>,
        logical_ops: Vec<(PauliString, PauliString)>,
        coset_reps: Vec<PauliString>,
    ) -> Result<Self> {
        let n_phys = generators.first().map(PauliString::num_qubits).unwrap_or(0);
        let mut code = StabilizerCode {
            n_phys,
            k_log: logical_ops.len(),
            distance,
            generators,
            logical_ops,
            coset_reps,
            logical_basis: Vec::new(),
        };
        code.logical_basis = code.compute_logical_basis()?;
        Ok(code)
    }

    pub fn n_phys(&self) -> usize {
        self.n_phys
    }

    pub fn k_log(&self) -> usize {
        self.k_log
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn logical_ops(&self) -> &[(PauliString, PauliString)] {
        &self.logical_ops
    }

    pub fn coset_reps(&self) -> &[PauliString] {
        &self.coset_reps
    }

    pub fn logical_basis(&self) -> &[StateVector] {
        &self.logical_basis
    }

    pub fn syndrome_len(&self) -> usize {
        self.generators.len()
    }

    fn syndrome_index(&self, e: &PauliString) -> usize {
        self.generators.iter().fold(0, |acc, g| (acc << 1) | e.symplectic(g) as usize)
    }

    /// Pairwise commutation, independence, and logical-operator algebra.
    fn check_algebra(&self) -> Result<()> {
        let n = self.n_phys;
        let all = self.generators.iter().chain(self.logical_ops.iter().flat_map(|(x, z)| [x, z]));
        if let Some(bad) = all.clone().find(|p| p.num_qubits() != n || !p.is_hermitian()) {
            return Err(Error::InvalidCode(alloc::format!("{bad} is not a Hermitian {n}-qubit Pauli")));
        }
        for (i, a) in self.generators.iter().enumerate() {
            for b in &self.generators[i + 1..] {
                if !a.commutes_with(b) {
                    return Err(Error::InvalidCode(alloc::format!("generators {a} and {b} anticommute")));
                }
            }
            for (x, z) in &self.logical_ops {
                if !a.commutes_with(x) || !a.commutes_with(z) {
                    return Err(Error::InvalidCode(alloc::format!("logical operator anticommutes with {a}")));
                }
            }
        }
        let rows: Vec<u128> = self.generators.iter().map(symplectic_row).collect();
        if gf2_rank(rows) != self.generators.len() {
            return Err(Error::InvalidCode(alloc::string::String::from("generators are not independent")));
        }
        for (i, (xi, zi)) in self.logical_ops.iter().enumerate() {
            for (j, (xj, zj)) in self.logical_ops.iter().enumerate() {
                let expect_anti = (i == j) as u8;
                if xi.symplectic(zj) != expect_anti || xi.symplectic(xj) != 0 || zi.symplectic(zj) != 0 {
                    return Err(Error::InvalidCode(alloc::string::String::from("logical operators are not canonical")));
                }
            }
        }
        Ok(())
    }

    /// Checks every structural invariant, including the coset table.
    pub fn check_invariants(&self) -> Result<()> {
        self.check_algebra()?;
        if self.coset_reps.len() != 1 << self.syndrome_len() {
            return Err(Error::InvalidCode(alloc::string::String::from("coset table has the wrong size")));
        }
        if !self.coset_reps[0].is_identity_up_to_phase() {
            return Err(Error::InvalidCode(alloc::string::String::from("zero syndrome must map to identity")));
        }
        for (s, rep) in self.coset_reps.iter().enumerate() {
            if self.syndrome_index(rep) != s {
                return Err(Error::InvalidCode(alloc::format!("coset representative {rep} has the wrong syndrome")));
            }
        }
        Ok(())
    }

    /// Minimum weight of a Pauli that commutes with every generator but is
    /// not itself a stabilizer (up to phase). Exhaustive.
    pub fn compute_distance(&self) -> usize {
        let r = self.generators.len();
        let mut stabilizer_supports = Vec::with_capacity(1 << r);
        for subset in 0usize..(1 << r) {
            let mut acc = PauliString::identity(self.n_phys);
            for (i, g) in self.generators.iter().enumerate() {
                if subset >> i & 1 == 1 {
                    acc = &acc * g;
                }
            }
            stabilizer_supports.push((acc.x_mask(), acc.z_mask()));
        }
        paulis_by_weight(self.n_phys)
            .into_iter()
            .filter(|p| p.weight() > 0)
            .find(|p| self.syndrome_index(p) == 0 && !stabilizer_supports.contains(&(p.x_mask(), p.z_mask())))
            .map(|p| p.weight())
            .unwrap_or(self.n_phys)
    }

    fn compute_logical_basis(&self) -> Result<Vec<StateVector>> {
        let n = self.n_phys;
        let projectors: Vec<&PauliString> =
            self.generators.iter().chain(self.logical_ops.iter().map(|(_, z)| z)).collect();
        let mut zero = None;
        for b in 0..1usize << n {
            let mut state = StateVector::basis(n, b)?;
            let mut ok = true;
            for p in &projectors {
                let amps = p.project(&state, 1.0)?;
                match StateVector::normalized(amps) {
                    Ok(s) => state = s,
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                zero = Some(state);
                break;
            }
        }
        let zero = zero.ok_or_else(|| Error::InvalidCode(alloc::string::String::from("empty codespace")))?;
        // Fix the global phase: first significant amplitude real and positive.
        let lead = zero.amplitudes().iter().find(|a| a.norm() > 1e-6).copied().unwrap_or(Complex64::new(1.0, 0.0));
        let zero = zero.with_global_phase(lead.conj() / lead.norm());
        let mut basis = Vec::with_capacity(1 << self.k_log);
        for b in 0..1usize << self.k_log {
            let mut s = zero.clone();
            for (j, (x, _)) in self.logical_ops.iter().enumerate() {
                if b >> (self.k_log - 1 - j) & 1 == 1 {
                    s = x.apply(&s)?;
                }
            }
            basis.push(s);
        }
        Ok(basis)
    }

    /// Syndrome of a Pauli error: bit `i` is its commutation sign with
    /// generator `i`.
    pub fn syndrome_of_error(&self, e: &PauliString) -> Result<Syndrome> {
        self.blocks(1).syndrome_of_error(e)
    }

    pub fn coset_rep(&self, s: &Syndrome) -> Result<&PauliString> {
        if s.len() != self.syndrome_len() {
            return Err(Error::DimensionMismatch { expected: self.syndrome_len(), actual: s.len() });
        }
        Ok(&self.coset_reps[s.index()])
    }

    pub fn encode(&self, logical: &StateVector) -> Result<StateVector> {
        self.blocks(1).encode(logical)
    }

    pub fn apply_syndrome_offset(&self, state: &StateVector, s: &Syndrome) -> Result<StateVector> {
        self.blocks(1).apply_syndrome_offset(state, s)
    }

    pub fn measure_syndrome(&self, state: &StateVector, rng: &mut RandomStream) -> Result<(Syndrome, StateVector)> {
        self.blocks(1).measure_syndrome(state, rng)
    }

    pub fn decode(&self, state: &StateVector, s: &Syndrome) -> Result<StateVector> {
        self.blocks(1).decode(state, s)
    }

    /// Corrects the error implied by `measured` against the `expected`
    /// offset, then decodes.
    pub fn correct_and_decode(
        &self,
        state: &StateVector,
        measured: &Syndrome,
        expected: &Syndrome,
    ) -> Result<StateVector> {
        self.blocks(1).correct_and_decode(state, measured, expected)
    }

    fn blocks(&self, count: usize) -> Blocks<'_> {
        Blocks { code: self, count }
    }

    /// Conjugates every operator of the code by `frame`.
    fn transformed(&self, frame: &LocalClifford) -> Result<StabilizerCode> {
        let mut code = StabilizerCode {
            n_phys: self.n_phys,
            k_log: self.k_log,
            distance: self.distance,
            generators: self.generators.iter().map(|g| frame.conjugate(g)).collect(),
            logical_ops: self.logical_ops.iter().map(|(x, z)| (frame.conjugate(x), frame.conjugate(z))).collect(),
            // Conjugation preserves commutation, hence syndromes and weights.
            coset_reps: self.coset_reps.iter().map(|e| frame.conjugate(e).with_phase(Phase::PlusOne)).collect(),
            logical_basis: Vec::new(),
        };
        code.logical_basis = code.compute_logical_basis()?;
        Ok(code)
    }
}

/// The perfect `[[5,1,3]]` code: cyclic shifts of `XZZXI`, with
/// `X_L = XXXXX` and `Z_L = ZZZZZ`.
pub fn base_code() -> StabilizerCode {
    let p = |s: &str| s.parse::<PauliString>().expect("static Pauli literal");
    StabilizerCode::new(
        alloc::vec![p("XZZXI"), p("IXZZX"), p("XIXZZ"), p("ZXIXZ")],
        alloc::vec![(p("XXXXX"), p("ZZZZZ"))],
    )
    .expect("the five-qubit code is valid")
}

/// A qubit permutation plus a single-qubit Clifford on every qubit, as the
/// images of `X` and `Z`.
#[derive(Clone, Debug, PartialEq)]
struct LocalClifford {
    /// Old qubit `q` moves to `perm[q]`.
    perm: Vec<usize>,
    /// `(C X C†, C Z C†)` per old qubit, as one-qubit strings.
    images: Vec<(PauliString, PauliString)>,
}

impl LocalClifford {
    fn identity(n: usize) -> Self {
        LocalClifford {
            perm: (0..n).collect(),
            images: (0..n)
                .map(|_| (PauliString::single(1, 0, Pauli::X), PauliString::single(1, 0, Pauli::Z)))
                .collect(),
        }
    }

    /// One of the 24 single-qubit Cliffords modulo phase: an ordered pair of
    /// distinct axes for the images of X and Z, each with a sign.
    fn single(choice: usize) -> (PauliString, PauliString) {
        const PAIRS: [(Pauli, Pauli); 6] = [
            (Pauli::X, Pauli::Z),
            (Pauli::X, Pauli::Y),
            (Pauli::Y, Pauli::Z),
            (Pauli::Y, Pauli::X),
            (Pauli::Z, Pauli::X),
            (Pauli::Z, Pauli::Y),
        ];
        let (a, b) = PAIRS[choice % 6];
        let sign = |neg: bool| if neg { Phase::MinusOne } else { Phase::PlusOne };
        (
            PauliString::single(1, 0, a).with_phase(sign((choice / 6) & 1 == 1)),
            PauliString::single(1, 0, b).with_phase(sign((choice / 12) & 1 == 1)),
        )
    }

    fn random(n: usize, rng: &mut RandomStream) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut perm);
        let images = (0..n).map(|_| Self::single(rng.below(24))).collect();
        LocalClifford { perm, images }
    }

    fn conjugate(&self, p: &PauliString) -> PauliString {
        let n = p.num_qubits();
        let mut out = PauliString::identity(n).with_phase(p.phase());
        for q in 0..n {
            let (x_img, z_img) = &self.images[q];
            let image = match p.get(q) {
                Pauli::I => continue,
                Pauli::X => x_img.clone(),
                Pauli::Z => z_img.clone(),
                // Y = i·X·Z
                Pauli::Y => {
                    let xz = x_img * z_img;
                    xz.clone().with_phase(xz.phase() * Phase::PlusI)
                }
            };
            out = &out * &image.embed(n, self.perm[q]);
        }
        out
    }
}

/// `Q_k`: the base code under the transformation seeded by `k`. The all-zero
/// key selects the base code itself.
pub fn derive_code(k: &CodeFamilyKey) -> Result<StabilizerCode> {
    let base = base_code();
    if k.bits().is_zero() {
        return Ok(base);
    }
    let mut rng = RandomStream::new(RandomStream::derive_seed(k.seed(), "code-family"));
    let frame = LocalClifford::random(base.n_phys(), &mut rng);
    if frame == LocalClifford::identity(base.n_phys()) {
        return Ok(base);
    }
    base.transformed(&frame)
}

/// `count` copies of a code side by side, one per logical block.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockCode {
    code: StabilizerCode,
    count: usize,
}

impl BlockCode {
    pub fn new(code: StabilizerCode, count: usize) -> Result<Self> {
        if count == 0 || count * code.n_phys > DEFAULT_MAX_QUBITS {
            return Err(Error::TooManyQubits { requested: count * code.n_phys, limit: DEFAULT_MAX_QUBITS });
        }
        Ok(BlockCode { code, count })
    }

    pub fn code(&self) -> &StabilizerCode {
        &self.code
    }

    pub fn blocks(&self) -> usize {
        self.count
    }

    pub fn n_phys(&self) -> usize {
        self.count * self.code.n_phys
    }

    pub fn k_log(&self) -> usize {
        self.count * self.code.k_log
    }

    pub fn syndrome_len(&self) -> usize {
        self.count * self.code.syndrome_len()
    }

    fn view(&self) -> Blocks<'_> {
        self.code.blocks(self.count)
    }

    pub fn syndrome_of_error(&self, e: &PauliString) -> Result<Syndrome> {
        self.view().syndrome_of_error(e)
    }

    pub fn coset_rep(&self, s: &Syndrome) -> Result<PauliString> {
        self.view().coset_rep(s)
    }

    pub fn encode(&self, logical: &StateVector) -> Result<StateVector> {
        self.view().encode(logical)
    }

    pub fn apply_syndrome_offset(&self, state: &StateVector, s: &Syndrome) -> Result<StateVector> {
        self.view().apply_syndrome_offset(state, s)
    }

    pub fn measure_syndrome(&self, state: &StateVector, rng: &mut RandomStream) -> Result<(Syndrome, StateVector)> {
        self.view().measure_syndrome(state, rng)
    }

    pub fn decode(&self, state: &StateVector, s: &Syndrome) -> Result<StateVector> {
        self.view().decode(state, s)
    }

    pub fn correct_and_decode(
        &self,
        state: &StateVector,
        measured: &Syndrome,
        expected: &Syndrome,
    ) -> Result<StateVector> {
        self.view().correct_and_decode(state, measured, expected)
    }
}

/// Borrowed blockwise view shared by [`StabilizerCode`] and [`BlockCode`].
struct Blocks<'a> {
    code: &'a StabilizerCode,
    count: usize,
}

impl Blocks<'_> {
    fn total_phys(&self) -> usize {
        self.count * self.code.n_phys
    }

    fn total_syndrome(&self) -> usize {
        self.count * self.code.syndrome_len()
    }

    fn embedded_generators(&self) -> impl Iterator<Item = PauliString> + '_ {
        let n = self.code.n_phys;
        let total = self.total_phys();
        (0..self.count).flat_map(move |b| self.code.generators.iter().map(move |g| g.embed(total, b * n)))
    }

    fn check_state(&self, state: &StateVector, qubits: usize) -> Result<()> {
        if state.num_qubits() != qubits {
            return Err(Error::DimensionMismatch { expected: qubits, actual: state.num_qubits() });
        }
        Ok(())
    }

    fn syndrome_of_error(&self, e: &PauliString) -> Result<Syndrome> {
        if e.num_qubits() != self.total_phys() {
            return Err(Error::DimensionMismatch { expected: self.total_phys(), actual: e.num_qubits() });
        }
        Ok(Syndrome(self.embedded_generators().map(|g| e.symplectic(&g) == 1).collect()))
    }

    fn coset_rep(&self, s: &Syndrome) -> Result<PauliString> {
        if s.len() != self.total_syndrome() {
            return Err(Error::DimensionMismatch { expected: self.total_syndrome(), actual: s.len() });
        }
        let r = self.code.syndrome_len();
        let mut rep = PauliString::identity(self.total_phys());
        for b in 0..self.count {
            let block_s = Syndrome(s.bits().slice(b * r..(b + 1) * r));
            let e = self.code.coset_rep(&block_s)?;
            rep = &rep * &e.embed(self.total_phys(), b * self.code.n_phys);
        }
        Ok(rep)
    }

    /// Applies the per-block encoding isometry to each logical qubit group in
    /// turn. Register layout during step `i`: `i` encoded blocks, then the
    /// remaining logical qubits.
    fn encode(&self, logical: &StateVector) -> Result<StateVector> {
        let (n, k) = (self.code.n_phys, self.code.k_log);
        self.check_state(logical, self.count * k)?;
        let basis = &self.code.logical_basis;
        let mut amps = logical.amplitudes().to_vec();
        for i in 0..self.count {
            let suffix_qubits = (self.count - i - 1) * k;
            let suffix = 1usize << suffix_qubits;
            let prefix = amps.len() >> (k + suffix_qubits);
            let mut next = alloc::vec![Complex64::new(0.0, 0.0); prefix << (n + suffix_qubits)];
            for pre in 0..prefix {
                for (b, column) in basis.iter().enumerate() {
                    for suf in 0..suffix {
                        let a = amps[(pre << (k + suffix_qubits)) | (b << suffix_qubits) | suf];
                        if a == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        for (p, v) in column.amplitudes().iter().enumerate() {
                            next[(pre << (n + suffix_qubits)) | (p << suffix_qubits) | suf] += v * a;
                        }
                    }
                }
            }
            amps = next;
        }
        StateVector::from_amplitudes(amps)
    }

    fn apply_syndrome_offset(&self, state: &StateVector, s: &Syndrome) -> Result<StateVector> {
        self.check_state(state, self.total_phys())?;
        self.coset_rep(s)?.apply(state)
    }

    fn measure_syndrome(&self, state: &StateVector, rng: &mut RandomStream) -> Result<(Syndrome, StateVector)> {
        self.check_state(state, self.total_phys())?;
        let mut post = state.clone();
        let mut bits = Bits::new();
        for g in self.embedded_generators() {
            let (eigenvalue, next) = g.measure(&post, rng)?;
            bits.push(eigenvalue == -1);
            post = next;
        }
        Ok((Syndrome(bits), post))
    }

    fn decode(&self, state: &StateVector, s: &Syndrome) -> Result<StateVector> {
        self.check_state(state, self.total_phys())?;
        let restored = self.coset_rep(s)?.apply(state)?;
        for (i, g) in self.embedded_generators().enumerate() {
            if g.expectation(&restored)? < 1.0 - CODESPACE_TOLERANCE {
                return Err(Error::DecodeFailure { generator: i });
            }
        }
        let (n, k) = (self.code.n_phys, self.code.k_log);
        let basis = &self.code.logical_basis;
        let mut amps = restored.into_amplitudes();
        // Layout during step `i`: `i` decoded logical groups, then physical blocks.
        for i in 0..self.count {
            let suffix_qubits = (self.count - i - 1) * n;
            let suffix = 1usize << suffix_qubits;
            let prefix = 1usize << (i * k);
            let mut next = alloc::vec![Complex64::new(0.0, 0.0); prefix << (k + suffix_qubits)];
            for pre in 0..prefix {
                for (b, column) in basis.iter().enumerate() {
                    for suf in 0..suffix {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (p, v) in column.amplitudes().iter().enumerate() {
                            acc += v.conj() * amps[(pre << (n + suffix_qubits)) | (p << suffix_qubits) | suf];
                        }
                        next[(pre << (k + suffix_qubits)) | (b << suffix_qubits) | suf] = acc;
                    }
                }
            }
            amps = next;
        }
        StateVector::normalized(amps)
    }

    fn correct_and_decode(&self, state: &StateVector, measured: &Syndrome, expected: &Syndrome) -> Result<StateVector> {
        if measured.len() != expected.len() {
            return Err(Error::DimensionMismatch { expected: expected.len(), actual: measured.len() });
        }
        let error_syndrome = measured.xor(expected);
        let corrected = self.coset_rep(&error_syndrome)?.apply(state)?;
        self.decode(&corrected, expected)
    }
}

#[cfg(feature = "serde")]
mod serde_impl {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct LogicalPair {
        x: PauliString,
        z: PauliString,
    }

    #[derive(Serialize, Deserialize)]
    struct Repr {
        n_phys: usize,
        k_log: usize,
        distance: usize,
        generators: Vec<PauliString>,
        logical_ops: Vec<LogicalPair>,
    }

    impl Serialize for StabilizerCode {
        fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
            Repr {
                n_phys: self.n_phys,
                k_log: self.k_log,
                distance: self.distance,
                generators: self.generators.clone(),
                logical_ops: self.logical_ops.iter().map(|(x, z)| LogicalPair { x: x.clone(), z: z.clone() }).collect(),
            }
            .serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for StabilizerCode {
        fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
            use serde::de::Error as _;
            let r = Repr::deserialize(d)?;
            let code = StabilizerCode::new(r.generators, r.logical_ops.into_iter().map(|p| (p.x, p.z)).collect())
                .map_err(D::Error::custom)?;
            if code.n_phys != r.n_phys || code.k_log != r.k_log || code.distance != r.distance {
                return Err(D::Error::custom("recorded parameters do not match the generators"));
            }
            Ok(code)
        }
    }
}
