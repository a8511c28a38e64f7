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

//! Invariant battery behind `qsig selftest`.

use std::fmt;

use qsig_core::density::DensityMatrix;
use qsig_core::fingerprint::{build_code, SecretKey};
use qsig_core::pauli::{Pauli, PauliString};
use qsig_core::protocol::SessionConfig;
use qsig_core::qcrypto::{qotp_encrypt, QotpKey};
use qsig_core::stabilizer::{base_code, StabilizerCode, Syndrome};
use qsig_core::stats::within_sigmas;
use qsig_core::swap::swap_test;
use qsig_core::{Bits, RandomStream, StateVector};

const SEED: u64 = 0x5e1f_7e57;
const OVERLAP_TOLERANCE: f64 = 1e-12;
const FIDELITY_TOLERANCE: f64 = 1e-10;
const MIXING_TOLERANCE: f64 = 1e-10;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Quick,
    Full,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn outcome(name: &'static str, r: Result<String, String>) -> SuiteResult {
    match r {
        Ok(detail) => SuiteResult { name, passed: true, detail },
        Err(detail) => SuiteResult { name, passed: false, detail },
    }
}

pub fn run_all(mode: Mode) -> Vec<SuiteResult> {
    let root = RandomStream::new(SEED);
    vec![
        fingerprint_overlaps(mode),
        stabilizer_bijection(&base_code(), &mut root.derive("stabilizer")),
        qotp_mixing(mode, &mut root.derive("qotp")),
        swap_statistics(mode, &mut root.derive("swap")),
    ]
}

/// Exhaustive pairwise overlaps against codeword agreement counts.
pub fn fingerprint_overlaps(mode: Mode) -> SuiteResult {
    let max_w = if mode == Mode::Quick { 6 } else { 8 };
    let delta = SessionConfig::default().target_delta;
    let c_rate = 4;
    outcome(
        "fingerprint-overlaps",
        (|| {
            let mut pairs = 0u64;
            for w in 1..=max_w {
                let mut rng = RandomStream::new(SEED).derive(&format!("code/{w}"));
                let code = build_code(w, c_rate, delta, &mut rng).map_err(|e| format!("w={w}: {e}"))?;
                let m = code.m();
                let states = (0..1usize << w)
                    .map(|u| code.fingerprint(&SecretKey::new(Bits::from_u64(u as u64, w))))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| e.to_string())?;
                for a in 0..states.len() {
                    for b in a + 1..states.len() {
                        let agree = (0..m).filter(|&k| code.codeword(a).get(k) == code.codeword(b).get(k)).count();
                        let expected = agree as f64 / m as f64;
                        let ip = states[a].inner_product(&states[b]).map_err(|e| e.to_string())?;
                        if (ip.re - expected).abs() > OVERLAP_TOLERANCE || ip.im.abs() > OVERLAP_TOLERANCE {
                            return Err(format!("w={w} pair ({a},{b}): overlap {ip} but {agree}/{m} agreements"));
                        }
                        if expected > code.delta() + OVERLAP_TOLERANCE || code.delta() > delta {
                            return Err(format!("w={w} pair ({a},{b}): overlap {expected} above delta"));
                        }
                        pairs += 1;
                    }
                }
            }
            Ok(format!("{pairs} pairs, w=1..{max_w}, c_rate={c_rate}, delta<={delta}"))
        })(),
    )
}

/// Identity plus the 15 single-qubit Paulis must map one-to-one onto the
/// syndromes, through the code's own coset table, and be corrected exactly.
pub fn stabilizer_bijection(code: &StabilizerCode, rng: &mut RandomStream) -> SuiteResult {
    outcome(
        "stabilizer-bijection",
        (|| {
            code.check_invariants().map_err(|e| e.to_string())?;
            let n = code.n_phys();
            let mut errors = vec![PauliString::identity(n)];
            for q in 0..n {
                for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                    errors.push(PauliString::single(n, q, p));
                }
            }
            let mut seen = vec![false; 1 << code.syndrome_len()];
            let zero = Syndrome::zero(code.syndrome_len());
            for e in &errors {
                let s = code.syndrome_of_error(e).map_err(|x| x.to_string())?;
                if std::mem::replace(&mut seen[s.index()], true) {
                    return Err(format!("syndrome {} hit twice", s.index()));
                }
                let rep = code.coset_rep(&s).map_err(|x| x.to_string())?;
                if rep.x_mask() != e.x_mask() || rep.z_mask() != e.z_mask() {
                    return Err(format!("coset table maps syndrome {} to {rep}, expected {e}", s.index()));
                }
                let logical = StateVector::random(code.k_log(), rng).map_err(|x| x.to_string())?;
                let noisy = e.apply(&code.encode(&logical).map_err(|x| x.to_string())?).map_err(|x| x.to_string())?;
                let (measured, post) = code.measure_syndrome(&noisy, rng).map_err(|x| x.to_string())?;
                if measured != s {
                    return Err(format!("measured syndrome {} for {e}, expected {}", measured.index(), s.index()));
                }
                let out = code.correct_and_decode(&post, &measured, &zero).map_err(|x| x.to_string())?;
                let f = out.fidelity(&logical).map_err(|x| x.to_string())?;
                if f < 1.0 - FIDELITY_TOLERANCE {
                    return Err(format!("fidelity {f} after correcting {e}"));
                }
            }
            Ok(format!("{} errors, {} syndromes", errors.len(), seen.len()))
        })(),
    )
}

/// Averaging the pad over every key leaves the maximally mixed state.
pub fn qotp_mixing(mode: Mode, rng: &mut RandomStream) -> SuiteResult {
    let states_per_n = if mode == Mode::Quick { 3 } else { 10 };
    outcome(
        "qotp-mixing",
        (|| {
            let mut worst: f64 = 0.0;
            for n in 1..=2usize {
                for _ in 0..states_per_n {
                    let psi = StateVector::random(n, rng).map_err(|e| e.to_string())?;
                    let padded = (0..1u64 << (2 * n))
                        .map(|k| qotp_encrypt(&psi, &QotpKey::new(Bits::from_u64(k, 2 * n))?))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| e.to_string())?;
                    let rho = DensityMatrix::average_of(&padded).map_err(|e| e.to_string())?;
                    let d = rho.trace_distance(&DensityMatrix::maximally_mixed(1 << n)).map_err(|e| e.to_string())?;
                    worst = worst.max(d);
                }
            }
            if worst > MIXING_TOLERANCE {
                return Err(format!("trace distance {worst:e}"));
            }
            Ok(format!("max trace distance {worst:.1e} over n_msg=1,2"))
        })(),
    )
}

/// Empirical pass rates against `(1 + |⟨a|b⟩|²) / 2` within 3σ.
pub fn swap_statistics(mode: Mode, rng: &mut RandomStream) -> SuiteResult {
    let trials: u64 = if mode == Mode::Quick { 2_000 } else { 10_000 };
    outcome(
        "swap-statistics",
        (|| {
            let a = StateVector::real_qubit(0.0);
            for overlap in [1.0f64, 0.5, 0.25, 0.0] {
                let b = StateVector::real_qubit(overlap.acos());
                let mut passes = 0u64;
                for _ in 0..trials {
                    passes += swap_test(&a, &b, rng).map_err(|e| e.to_string())? as u64;
                }
                let rate = passes as f64 / trials as f64;
                let expected = (1.0 + overlap * overlap) / 2.0;
                let ok = if overlap == 1.0 { passes == trials } else { within_sigmas(rate, expected, trials, 3.0) };
                if !ok {
                    return Err(format!("overlap {overlap}: rate {rate}, expected {expected}"));
                }
            }
            Ok(format!("{trials} trials per overlap in {{1, 0.5, 0.25, 0}}"))
        })(),
    )
}
