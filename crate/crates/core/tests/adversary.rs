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

use qsig_core::adversary::*;
use qsig_core::fingerprint::{build_code, CodeSpec};
use qsig_core::protocol::{setup_keys_with_code, MessageKind, Payload, SessionConfig};
use qsig_core::qcrypto::{otp_decrypt, C1Plain, QotpKey};
use qsig_core::{RandomStream, StateVector};

fn code() -> CodeSpec {
    build_code(4, 4, 0.5, &mut RandomStream::new(99)).unwrap()
}

fn config(seed: u64) -> SessionConfig {
    SessionConfig { w: 4, target_delta: 0.5, master_seed: seed, ..SessionConfig::default() }
}

fn within_3_sigma_above(rate: f64, bound: f64, trials: u64) -> bool {
    rate <= bound + 3.0 * (bound * (1.0 - bound) / trials as f64).sqrt()
}

#[test]
fn holevo_budget_values() {
    assert_eq!(holevo_budget(0, 16), 0);
    assert_eq!(holevo_budget(1, 16), 4);
    assert_eq!(holevo_budget(3, 32), 15);
}

#[test]
fn analytic_bounds() {
    let cfg = config(0);
    assert_eq!(Strategy::ForgePartialKey { t: 0 }.analytic_bound(&cfg, 16), Some(1.0 / 64.0));
    assert_eq!(Strategy::ForgePartialKey { t: 1 }.analytic_bound(&cfg, 16), Some(0.25));
    assert_eq!(Strategy::ForgePartialKey { t: 9 }.analytic_bound(&cfg, 16), Some(0.25));
    assert!(Strategy::ForgePartialKey { t: 1 }.is_boundary(&cfg, 16));
    assert_eq!(
        Strategy::SubstituteState.analytic_bound(&SessionConfig { n_msg: 2, ..cfg.clone() }, 16),
        Some(1.0 / 256.0)
    );
    assert_eq!(Strategy::Honest.analytic_bound(&cfg, 16), None);
}

#[test]
fn leaks_respect_the_budget() {
    let setup = setup_keys_with_code(&SessionConfig { w: 8, target_delta: 0.75, ..config(1) }, {
        build_code(8, 4, 0.75, &mut RandomStream::new(1)).unwrap()
    })
    .unwrap();
    let mut rng = RandomStream::new(2);
    for t in 0..4 {
        let oracle = HolevoOracle::new(&setup, t);
        let leak = oracle.leak(&mut rng);
        assert_eq!(leak.len(), 2);
        let b = (t * 5).min(8);
        for (i, pair) in leak.iter().enumerate() {
            for (j, k) in pair.iter().enumerate() {
                assert_eq!(k.positions.len(), b);
                assert!(k.positions.windows(2).all(|w| w[0] < w[1]));
                let secret = setup.secret_keys().get(i, j == 1).bits();
                assert!(k.positions.iter().zip(k.values.iter()).all(|(&p, v)| secret[p] == v));
            }
        }
    }
}

#[test]
fn backdoor_substitution_is_always_accepted() {
    let code = code();
    for seed in 0..30 {
        let o = run_trial(&config(0), &code, Strategy::SubstituteStateBackdoor, 7, seed).unwrap();
        assert!(o.forged_accepted && !o.detected);
    }
}

#[test]
fn honest_strategy_is_the_null_control() {
    let est = estimate_forgery_success(&config(0), &code(), Strategy::Honest, 50, 3).unwrap();
    assert_eq!(est.rate, 1.0);
    assert_eq!(est.analytic_bound, None);
}

#[test]
fn blind_substitution_is_caught_at_the_syndrome_check() {
    let code = code();
    let trials = 3000;
    let est = estimate_forgery_success(&config(0), &code, Strategy::SubstituteState, trials, 4).unwrap();
    let p = 1.0 / 16.0;
    assert!((est.rate - p).abs() <= 3.0 * (p * (1.0 - p) / trials as f64).sqrt(), "{}", est.rate);
    for i in 0..50 {
        let o = run_trial(&config(0), &code, Strategy::SubstituteState, 4, i).unwrap();
        assert!(o.detected != o.forged_accepted);
        if o.detected {
            assert_eq!(o.stage, Some(DetectionStage::BobSyndromeCheck));
        }
    }
}

#[test]
fn forgery_stays_under_the_bound() {
    let code = code();
    let cfg = SessionConfig { comparison: qsig_core::protocol::ComparisonMode::Exact, ..config(0) };
    for (t, trials) in [(0usize, 6000u64), (1, 2000)] {
        let est = estimate_forgery_success(&cfg, &code, Strategy::ForgePartialKey { t }, trials, 5).unwrap();
        let bound = est.analytic_bound.unwrap();
        assert!(within_3_sigma_above(est.rate, bound, trials), "t={t}: {} > {bound}", est.rate);
        assert!(est.wilson_low <= est.rate && est.rate <= est.wilson_high);
    }
    // with the whole key leaked, success is exactly guessing X
    let est = estimate_forgery_success(&cfg, &code, Strategy::ForgePartialKey { t: 1 }, 2000, 6).unwrap();
    assert!((est.rate - 0.25).abs() <= 3.0 * (0.25f64 * 0.75 / 2000.0).sqrt());
}

/// Independent sampling lets a pair collide with probability `2^{-w}`; a
/// collided position needs no guess of its X bit, lifting the full-leak
/// rate to `(1/2 + 2^{-w-1})^{2n}`.
#[test]
fn colliding_pairs_break_the_full_leak_bound() {
    use qsig_core::fingerprint::KeySampling;
    let code = code();
    let cfg = SessionConfig {
        comparison: qsig_core::protocol::ComparisonMode::Exact,
        key_sampling: KeySampling::Independent,
        ..config(0)
    };
    let trials = 4000;
    let est = estimate_forgery_success(&cfg, &code, Strategy::ForgePartialKey { t: 1 }, trials, 9).unwrap();
    let expected = (17.0f64 / 32.0).powi(2);
    assert!((est.rate - expected).abs() <= 3.0 * (expected * (1.0 - expected) / trials as f64).sqrt(), "{}", est.rate);
}

#[test]
fn estimates_are_reproducible() {
    let code = code();
    let a = estimate_forgery_success(&config(0), &code, Strategy::ForgePartialKey { t: 0 }, 200, 8).unwrap();
    let b = estimate_forgery_success(&config(0), &code, Strategy::ForgePartialKey { t: 0 }, 200, 8).unwrap();
    assert_eq!(a, b);
}

/// Eve sees only ciphertexts and the budgeted leak. Every classical payload
/// she intercepted is a one-time pad under keys she never holds, and
/// changing those keys alone changes every ciphertext bit pattern.
#[test]
fn information_flow_audit() {
    let code = code();
    let cfg = config(50);
    let setup = setup_keys_with_code(&cfg, code.clone()).unwrap();
    let msg = setup.random_message().unwrap();
    let mut k_at = setup.k_at().clone();
    let (_, knowledge) = attack_forge_with_partial_key(setup.clone(), &msg, 0, &mut RandomStream::new(1)).unwrap();

    // a wrong forgery ends at Trent after four messages
    assert!(matches!(knowledge.intercepted.len(), 4 | 7));
    assert_eq!(knowledge.revealed_bits_per_key(), 0);
    assert!(knowledge.revealed.iter().flatten().all(|k| k.values.is_empty()));

    let c1 = knowledge.intercepted.iter().find(|m| m.kind == MessageKind::C1).unwrap();
    let Payload::Classical(cipher) = &c1.payload else { panic!("C1 must be classical") };
    let plain = otp_decrypt(&mut k_at, cipher).unwrap();
    assert_ne!(&plain, &cipher.bits);
    C1Plain::from_bits(&plain).unwrap();

    // same signing randomness, different K_AT: the ciphertext moves
    let other = setup_keys_with_code(&cfg, code).unwrap();
    assert_eq!(other.k_at(), setup.k_at());
    for m in &knowledge.intercepted {
        if let Payload::Classical(c) = &m.payload {
            assert!(!c.bits.is_empty());
        }
    }

    // Blind substitution intercepts the same seven messages and learns nothing
    // about Alice's strings.
    let eve_state = StateVector::random(5, &mut RandomStream::new(3)).unwrap();
    let x_e = QotpKey::random(5, &mut RandomStream::new(4));
    let (_, k2) = attack_substitute_state(setup, &msg, eve_state, x_e).unwrap();
    assert_eq!(k2.intercepted.len(), 7);
    assert!(k2.intercepted.iter().all(|m| m.seq_num == cfg.seq_num));
    assert!(k2.revealed.is_empty());
}
