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

//! Dense statevectors.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::AMPLITUDE_TOLERANCE;

/// Default cap on simulated register size.
pub const DEFAULT_MAX_QUBITS: usize = 20;

/// A normalized pure state on `num_qubits` qubits.
///
/// Basis index `b` has qubit 0 as its most significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Validates length and normalization (within 1e-10) and the default
    /// qubit cap.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        Self::from_amplitudes_with_limit(amps, DEFAULT_MAX_QUBITS)
    }

    pub fn from_amplitudes_with_limit(amps: Vec<Complex64>, max_qubits: usize) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > max_qubits {
            return Err(Error::TooManyQubits { requested: num_qubits, limit: max_qubits });
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > AMPLITUDE_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(StateVector { num_qubits, amps })
    }

    /// Scales `amps` to unit norm first. Fails on the zero vector.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < AMPLITUDE_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr: norm * norm });
        }
        for a in &mut amps {
            *a /= norm;
        }
        Self::from_amplitudes(amps)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits > DEFAULT_MAX_QUBITS {
            return Err(Error::TooManyQubits { requested: num_qubits, limit: DEFAULT_MAX_QUBITS });
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: index });
        }
        let mut amps = alloc::vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    /// `|+⟩^{⊗n}`.
    pub fn plus(num_qubits: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        let a = 1.0 / (dim as f64).sqrt();
        Self::from_amplitudes(alloc::vec![Complex64::new(a, 0.0); dim])
    }

    /// Haar-random pure state (normalized complex Gaussian vector).
    pub fn random(num_qubits: usize, rng: &mut RandomStream) -> Result<Self> {
        if num_qubits > DEFAULT_MAX_QUBITS {
            return Err(Error::TooManyQubits { requested: num_qubits, limit: DEFAULT_MAX_QUBITS });
        }
        let amps = (0..1usize << num_qubits).map(|_| Complex64::new(rng.gaussian(), rng.gaussian())).collect();
        Self::normalized(amps)
    }

    /// Single-qubit `cos θ|0⟩ + sin θ|1⟩`.
    pub fn real_qubit(theta: f64) -> Self {
        StateVector {
            num_qubits: 1,
            amps: alloc::vec![Complex64::new(theta.cos(), 0.0), Complex64::new(theta.sin(), 0.0)],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub(crate) fn from_raw(num_qubits: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << num_qubits);
        StateVector { num_qubits, amps }
    }

    fn check_same_dim(&self, other: &StateVector) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, actual: other.num_qubits });
        }
        Ok(())
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_dim(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm_sqr())
    }

    /// Equality up to global phase, via fidelity.
    pub fn approx_eq_up_to_phase(&self, other: &StateVector) -> bool {
        matches!(self.fidelity(other), Ok(f) if f >= 1.0 - AMPLITUDE_TOLERANCE)
    }

    /// Kronecker product with `self` as the left (more significant) factor.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.num_qubits + other.num_qubits;
        if n > DEFAULT_MAX_QUBITS {
            return Err(Error::TooManyQubits { requested: n, limit: DEFAULT_MAX_QUBITS });
        }
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(StateVector { num_qubits: n, amps })
    }

    /// Multiplies every amplitude by `phase` (unit modulus).
    pub fn with_global_phase(mut self, phase: Complex64) -> StateVector {
        for a in &mut self.amps {
            *a *= phase;
        }
        self
    }
}

/// Tensor product of a sequence of states, left to right.
pub fn tensor_all<'a>(states: impl IntoIterator<Item = &'a StateVector>) -> Result<StateVector> {
    let mut iter = states.into_iter();
    let first = iter.next().ok_or_else(|| Error::InvalidConfig(alloc::string::String::from("empty tensor product")))?;
    iter.try_fold(first.clone(), |acc, s| acc.tensor(s))
}

#[cfg(feature = "serde")]
mod serde_impl {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    /// Simulation-debug representation; amplitudes are not observable on
    /// real hardware, hence the marker field.
    #[derive(Serialize, Deserialize)]
    struct Repr {
        non_physical: bool,
        num_qubits: usize,
        amplitudes: Vec<(f64, f64)>,
    }

    impl Serialize for StateVector {
        fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
            Repr {
                non_physical: true,
                num_qubits: self.num_qubits,
                amplitudes: self.amps.iter().map(|a| (a.re, a.im)).collect(),
            }
            .serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for StateVector {
        fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
            let repr = Repr::deserialize(d)?;
            let amps: Vec<Complex64> = repr.amplitudes.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
            let state = StateVector::from_amplitudes(amps).map_err(serde::de::Error::custom)?;
            if state.num_qubits != repr.num_qubits {
                return Err(serde::de::Error::custom("num_qubits does not match amplitude count"));
            }
            Ok(state)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tensor_of_basis_states() {
        let s = StateVector::basis(1, 0).unwrap().tensor(&StateVector::basis(1, 1).unwrap()).unwrap();
        assert_eq!(s.num_qubits(), 2);
        assert_eq!(s.amplitudes(), &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
    }

    #[test]
    fn tensor_of_plus_states_is_uniform() {
        let p = StateVector::plus(1).unwrap();
        let s = p.tensor(&p).unwrap();
        for a in s.amplitudes() {
            assert!((a - c(0.5, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn inner_products() {
        let zero = StateVector::basis(1, 0).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        assert_eq!(zero.inner_product(&one).unwrap(), c(0.0, 0.0));
        let mut rng = RandomStream::new(3);
        let psi = StateVector::random(4, &mut rng).unwrap();
        assert!((psi.inner_product(&psi).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_first_argument() {
        let a = StateVector::from_amplitudes(alloc::vec![c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let b = StateVector::basis(1, 0).unwrap();
        assert_eq!(a.inner_product(&b).unwrap(), c(0.0, -1.0));
        assert_eq!(b.inner_product(&a).unwrap(), c(0.0, 1.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(StateVector::from_amplitudes(alloc::vec![c(1.0, 0.0); 3]), Err(Error::NotPowerOfTwo(3))));
        assert!(matches!(StateVector::from_amplitudes(alloc::vec![c(1.0, 0.0); 2]), Err(Error::NotNormalized { .. })));
        assert!(matches!(StateVector::zero(21), Err(Error::TooManyQubits { .. })));
        let a = StateVector::zero(1).unwrap();
        let b = StateVector::zero(2).unwrap();
        assert!(matches!(a.inner_product(&b), Err(Error::DimensionMismatch { .. })));
    }
}
