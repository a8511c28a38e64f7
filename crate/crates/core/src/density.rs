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

//! Small density-matrix helpers for mixing checks. Not a general simulator.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Row-major `dim × dim` complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zeros(dim: usize) -> Self {
        DensityMatrix { dim, entries: alloc::vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(state: &StateVector) -> Self {
        let a = state.amplitudes();
        let dim = a.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in a {
            entries.extend(a.iter().map(|c| r * c.conj()));
        }
        DensityMatrix { dim, entries }
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        m
    }

    /// Uniform average of pure states.
    pub fn average_of<'a>(states: impl IntoIterator<Item = &'a StateVector>) -> Result<Self> {
        let mut acc: Option<DensityMatrix> = None;
        let mut count = 0usize;
        for s in states {
            let p = Self::pure(s);
            match &mut acc {
                None => acc = Some(p),
                Some(m) => {
                    if m.dim != p.dim {
                        return Err(Error::DimensionMismatch { expected: m.dim, actual: p.dim });
                    }
                    for (x, y) in m.entries.iter_mut().zip(&p.entries) {
                        *x += y;
                    }
                }
            }
            count += 1;
        }
        let mut m = acc.ok_or_else(|| Error::InvalidConfig(alloc::string::String::from("empty average")))?;
        for x in &mut m.entries {
            *x /= count as f64;
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.dim + c]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `Tr(self · other)`.
    pub fn overlap(&self, other: &DensityMatrix) -> Complex64 {
        let d = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                acc += self.get(i, k) * other.get(k, i);
            }
        }
        acc
    }

    /// `½ ‖self − other‖₁` for Hermitian inputs, via the eigenvalues of the
    /// difference.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: other.dim });
        }
        let diff: Vec<Complex64> = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        let eig = hermitian_eigenvalues(self.dim, &diff);
        // Each eigenvalue of the complex matrix appears twice in its real embedding.
        Ok(eig.iter().map(|e| e.abs()).sum::<f64>() / 4.0)
    }
}

/// Eigenvalues of the real symmetric embedding `[[Re, −Im], [Im, Re]]` of a
/// Hermitian matrix, by cyclic Jacobi rotations. Every eigenvalue of the
/// original appears twice.
fn hermitian_eigenvalues(dim: usize, h: &[Complex64]) -> Vec<f64> {
    let n = 2 * dim;
    let mut a = alloc::vec![0.0f64; n * n];
    for r in 0..dim {
        for c in 0..dim {
            let z = h[r * dim + c];
            a[r * n + c] = z.re;
            a[r * n + c + dim] = -z.im;
            a[(r + dim) * n + c] = z.im;
            a[(r + dim) * n + c + dim] = z.re;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_pure_states_are_at_distance_one() {
        let a = DensityMatrix::pure(&StateVector::basis(1, 0).unwrap());
        let b = DensityMatrix::pure(&StateVector::basis(1, 1).unwrap());
        assert!((a.trace_distance(&b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_state_pair_distance_matches_closed_form() {
        // For pure states D = sqrt(1 - |⟨a|b⟩|²).
        let mut rng = crate::rng::RandomStream::new(4);
        for _ in 0..5 {
            let a = StateVector::random(2, &mut rng).unwrap();
            let b = StateVector::random(2, &mut rng).unwrap();
            let expected = (1.0 - a.fidelity(&b).unwrap()).sqrt();
            let got = DensityMatrix::pure(&a).trace_distance(&DensityMatrix::pure(&b)).unwrap();
            assert!((got - expected).abs() < 1e-10, "{got} vs {expected}");
        }
    }

    #[test]
    fn pure_state_to_maximally_mixed() {
        let a = DensityMatrix::pure(&StateVector::zero(1).unwrap());
        assert!((a.trace_distance(&DensityMatrix::maximally_mixed(2)).unwrap() - 0.5).abs() < 1e-12);
        assert!((a.trace().re - 1.0).abs() < 1e-12);
    }
}
