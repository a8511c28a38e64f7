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

//! Swap-test state comparison.
//!
//! The controlled-swap circuit accepts with probability `(1 + |⟨a|b⟩|²)/2`:
//! identical states always pass, distinct states fail with probability
//! `(1 - |⟨a|b⟩|²)/2`. The simulator samples that Bernoulli directly; the
//! explicit circuit lives in the tests as an oracle.

use crate::error::Result;
use crate::rng::RandomStream;
use crate::state::StateVector;
use crate::AMPLITUDE_TOLERANCE;

/// Exact acceptance probability of the swap test.
pub fn pass_probability(a: &StateVector, b: &StateVector) -> Result<f64> {
    let f = a.fidelity(b)?;
    if f >= 1.0 - AMPLITUDE_TOLERANCE {
        return Ok(1.0);
    }
    Ok((1.0 + f.min(1.0)) / 2.0)
}

/// One run of the swap test. `true` means the states were judged equal.
pub fn swap_test(a: &StateVector, b: &StateVector, rng: &mut RandomStream) -> Result<bool> {
    Ok(rng.bernoulli(pass_probability(a, b)?))
}

/// Joint pass probability of independent swap tests on each pair, i.e. the
/// product of the per-pair probabilities.
pub fn joint_pass_probability<'a>(pairs: impl IntoIterator<Item = (&'a StateVector, &'a StateVector)>) -> Result<f64> {
    pairs.into_iter().try_fold(1.0, |acc, (a, b)| Ok(acc * pass_probability(a, b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DensityMatrix;
    use alloc::vec::Vec;
    use num_complex::Complex64;

    /// Explicit circuit: ancilla ⊗ a ⊗ b, H on the ancilla, controlled swap,
    /// H again, then the probability of reading the ancilla as 0.
    fn circuit_pass_probability(a: &StateVector, b: &StateVector) -> f64 {
        let n = a.num_qubits();
        let block = 1usize << n;
        let joint = a.tensor(b).unwrap();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        // After the first H: (|0⟩ + |1⟩)/√2 ⊗ |a b⟩.
        let mut amps = alloc::vec![Complex64::new(0.0, 0.0); 2 * block * block];
        for (idx, &amp) in joint.amplitudes().iter().enumerate() {
            amps[idx] += amp * h;
            // controlled swap on the |1⟩ branch
            let (ia, ib) = (idx / block, idx % block);
            amps[block * block + ib * block + ia] += amp * h;
        }
        // Second H, keep the ancilla-0 branch.
        (0..block * block).map(|i| ((amps[i] + amps[block * block + i]) * h).norm_sqr()).sum()
    }

    /// Same circuit on mixed inputs: P(pass) = (1 + Tr ρσ)/2.
    fn density_pass_probability(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
        (1.0 + rho.overlap(sigma).re) / 2.0
    }

    fn overlap_pair(eta: f64) -> (StateVector, StateVector) {
        (StateVector::real_qubit(0.0), StateVector::real_qubit(eta.acos()))
    }

    #[test]
    fn identical_states_always_pass() {
        let mut rng = RandomStream::new(11);
        let psi = StateVector::random(3, &mut rng).unwrap();
        assert_eq!(pass_probability(&psi, &psi).unwrap(), 1.0);
        assert!((0..2000).all(|_| swap_test(&psi, &psi, &mut rng).unwrap()));
    }

    #[test]
    fn orthogonal_states_pass_half_the_time() {
        let a = StateVector::basis(2, 1).unwrap();
        let b = StateVector::basis(2, 2).unwrap();
        assert_eq!(pass_probability(&a, &b).unwrap(), 0.5);
        assert!((circuit_pass_probability(&a, &b) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn quarter_overlap_matches_circuit_and_density_oracles() {
        let (a, b) = overlap_pair(0.25);
        let closed = pass_probability(&a, &b).unwrap();
        let circuit = circuit_pass_probability(&a, &b);
        let density = density_pass_probability(&DensityMatrix::pure(&a), &DensityMatrix::pure(&b));
        assert!((closed - 0.53125).abs() < 1e-12);
        assert!((circuit - 0.53125).abs() < 1e-12);
        assert!((density - 0.53125).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_circuit_on_random_pairs() {
        let mut rng = RandomStream::new(12);
        for n in 1..=3 {
            for _ in 0..10 {
                let a = StateVector::random(n, &mut rng).unwrap();
                let b = StateVector::random(n, &mut rng).unwrap();
                let diff = pass_probability(&a, &b).unwrap() - circuit_pass_probability(&a, &b);
                assert!(diff.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn empirical_rate_within_three_sigma() {
        let mut rng = RandomStream::new(13);
        let n = 5000;
        for _ in 0..5 {
            let a = StateVector::random(2, &mut rng).unwrap();
            let b = StateVector::random(2, &mut rng).unwrap();
            let p = pass_probability(&a, &b).unwrap();
            let passes = (0..n).filter(|_| swap_test(&a, &b, &mut rng).unwrap()).count();
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((passes as f64 / n as f64 - p).abs() <= 3.0 * sigma);
        }
    }

    #[test]
    fn joint_probability_is_product_of_pairs() {
        let delta: f64 = 0.5;
        let pairs: Vec<_> = (0..4).map(|_| overlap_pair(delta)).collect();
        let joint = joint_pass_probability(pairs.iter().map(|(a, b)| (a, b))).unwrap();
        assert!((joint - ((1.0 + delta * delta) / 2.0).powi(4)).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let a = StateVector::zero(1).unwrap();
        let b = StateVector::zero(2).unwrap();
        assert!(pass_probability(&a, &b).is_err());
    }
}
