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

//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines are always printed. The
//! process exits nonzero if any criterion fails. Every statistical check
//! uses a 3σ band with σ taken at the reference probability.

use std::time::{Duration, Instant};

use qsig::plan::{ExperimentPlan, Grid, StrategyName, SCHEMA_VERSION};
use qsig::report::Report;
use qsig::runner::{cell_code, run_trials};
use qsig::{run_plan, transcript, RunOptions};
use qsig_core::adversary::Strategy;
use qsig_core::density::DensityMatrix;
use qsig_core::fingerprint::{build_code, CodeSpec, SecretKey};
use qsig_core::pauli::{Pauli, PauliString};
use qsig_core::protocol::{
    alice_repudiation, bob_fabrication, run_session, setup_keys, ComparisonMode, DisputeVerdict, NoTap, SessionConfig,
};
use qsig_core::qcrypto::{qotp_encrypt, QotpKey};
use qsig_core::stabilizer::{base_code, Syndrome};
use qsig_core::swap::swap_test;
use qsig_core::{Bits, Complex64, RandomStream, StateVector};
use rayon::prelude::*;

const SEED: u64 = 20_260_415;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, Option<Duration>, fn() -> Outcome);

fn sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn code(w: usize, delta: f64, label: &str) -> Result<CodeSpec, String> {
    build_code(w, 4, delta, &mut RandomStream::new(SEED).derive(label)).map_err(err)
}

fn key(u: usize, w: usize) -> SecretKey {
    SecretKey::new(Bits::from_u64(u as u64, w))
}

/// Exhaustive: every distinct pair of fingerprints, for every w ≤ 8.
fn fingerprint_overlap_bound() -> Outcome {
    let delta = SessionConfig::default().target_delta;
    let mut pairs = 0u64;
    let mut worst = 0.0f64;
    for w in 1..=8 {
        let code = code(w, delta, &format!("c1/{w}"))?;
        let m = code.m();
        let words: Vec<Bits> = code.codewords().collect();
        let states = (0..1 << w).map(|u| code.fingerprint(&key(u, w))).collect::<Result<Vec<_>, _>>().map_err(err)?;
        for a in 0..states.len() {
            for b in a + 1..states.len() {
                let agree = words[a].iter().zip(words[b].iter()).filter(|(x, y)| x == y).count();
                let ratio = agree as f64 / m as f64;
                let ip = states[a].inner_product(&states[b]).map_err(err)?;
                let dev = (ip - Complex64::new(ratio, 0.0)).norm();
                worst = worst.max(dev);
                if dev > 1e-12 {
                    return Err(format!("w={w} ({a},{b}): ⟨f|f'⟩={ip}, agreements/m={ratio}"));
                }
                if ratio > delta {
                    return Err(format!("w={w} ({a},{b}): agreements/m={ratio} > delta={delta}"));
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs for w=1..8, c_rate=4, delta={delta}, max deviation {worst:.1e}"))
}

fn pass_count(a: &StateVector, b: &StateVector, trials: u64, rng: &mut RandomStream) -> Result<u64, String> {
    let mut n = 0;
    for _ in 0..trials {
        n += swap_test(a, b, rng).map_err(err)? as u64;
    }
    Ok(n)
}

fn swap_test_statistics() -> Outcome {
    let trials = 10_000u64;
    let mut rng = RandomStream::new(SEED).derive("c2");
    let mut notes = Vec::new();

    let psi = StateVector::random(3, &mut rng).map_err(err)?;
    let same = pass_count(&psi, &psi, trials, &mut rng)?;
    if same != trials {
        return Err(format!("identical states passed {same}/{trials}"));
    }
    notes.push(format!("identical {same}/{trials}"));

    // |0⟩ against cos θ|0⟩ + sin θ|1⟩ has overlap cos θ.
    let zero = StateVector::real_qubit(0.0);
    for overlap in [0.0f64, 0.25, 0.5] {
        let other = StateVector::real_qubit(overlap.acos());
        let rate = pass_count(&zero, &other, trials, &mut rng)? as f64 / trials as f64;
        let p = (1.0 + overlap * overlap) / 2.0;
        if (rate - p).abs() > 3.0 * sigma(p, trials) {
            return Err(format!("overlap {overlap}: rate {rate}, expected {p}"));
        }
        notes.push(format!("|⟨a|b⟩|={overlap}: {rate:.4} vs {p:.4}"));
    }

    // Two fingerprints at the code's worst-case agreement have overlap exactly δ.
    let code = code(4, 0.5, "c2/code")?;
    let words: Vec<Bits> = code.codewords().collect();
    let (a, b) = (0..words.len())
        .flat_map(|a| (a + 1..words.len()).map(move |b| (a, b)))
        .max_by_key(|&(a, b)| words[a].iter().zip(words[b].iter()).filter(|(x, y)| x == y).count())
        .expect("at least two codewords");
    let (fa, fb) = (code.fingerprint(&key(a, 4)).map_err(err)?, code.fingerprint(&key(b, 4)).map_err(err)?);
    let delta = fa.inner_product(&fb).map_err(err)?.norm();
    if (delta - code.delta()).abs() > 1e-12 {
        return Err(format!("constructed pair has overlap {delta}, code delta {}", code.delta()));
    }
    for n in 1..=3i32 {
        let mut joint = 0u64;
        for _ in 0..trials {
            let mut all = true;
            for _ in 0..2 * n {
                all &= swap_test(&fa, &fb, &mut rng).map_err(err)?;
            }
            joint += all as u64;
        }
        let rate = joint as f64 / trials as f64;
        let p = ((1.0 + delta * delta) / 2.0).powi(2 * n);
        if (rate - p).abs() > 3.0 * sigma(p, trials) {
            return Err(format!("joint n_msg={n}: rate {rate}, expected {p}"));
        }
        notes.push(format!("joint n_msg={n}: {rate:.4} vs {p:.4}"));
    }
    Ok(notes.join("; "))
}

/// Syndrome bits from commutation with each generator, first generator first.
fn oracle_syndrome(gens: &[PauliString], e: &PauliString) -> usize {
    gens.iter().fold(0, |acc, g| (acc << 1) | (!g.commutes_with(e)) as usize)
}

fn stabilizer_completeness() -> Outcome {
    let code = base_code();
    let gens = code.generators().to_vec();
    let mut rng = RandomStream::new(SEED).derive("c3");
    let mut errors = vec![PauliString::identity(5)];
    for q in 0..5 {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            errors.push(PauliString::single(5, q, p));
        }
    }
    let mut hit = [false; 16];
    let mut worst = 1.0f64;
    let zero = Syndrome::zero(4);
    for e in &errors {
        let s = oracle_syndrome(&gens, e);
        if std::mem::replace(&mut hit[s], true) {
            return Err(format!("syndrome {s} is shared by two errors"));
        }
        if code.syndrome_of_error(e).map_err(err)?.index() != s {
            return Err(format!("syndrome_of_error disagrees with commutation for {e}"));
        }
        let logical = StateVector::random(1, &mut rng).map_err(err)?;
        let noisy = e.apply(&code.encode(&logical).map_err(err)?).map_err(err)?;
        let (measured, post) = code.measure_syndrome(&noisy, &mut rng).map_err(err)?;
        if measured.index() != s {
            return Err(format!("measured syndrome {} for {e}, expected {s}", measured.index()));
        }
        let f = code.correct_and_decode(&post, &measured, &zero).map_err(err)?.fidelity(&logical).map_err(err)?;
        worst = worst.min(f);
    }
    if !hit.iter().all(|&h| h) {
        return Err("some syndrome has no single-qubit error".into());
    }
    if worst < 1.0 - 1e-10 {
        return Err(format!("worst decode fidelity {worst}"));
    }
    Ok(format!("16 errors onto 16 syndromes, worst fidelity 1-{:.1e}", 1.0 - worst))
}

/// Pads by hand: X then Z per qubit, qubit 0 the most significant index bit.
fn pad_by_hand(psi: &StateVector, key: u64, n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (idx, &a) in psi.amplitudes().iter().enumerate() {
        let mut target = idx;
        let mut sign = 1.0;
        for q in 0..n {
            let bit = 1 << (n - 1 - q);
            if key >> (2 * n - 1 - 2 * q) & 1 == 1 {
                target ^= bit;
            }
            if key >> (2 * n - 2 - 2 * q) & 1 == 1 && target & bit != 0 {
                sign = -sign;
            }
        }
        out[target] = a * sign;
    }
    out
}

fn qotp_mixing() -> Outcome {
    let mut rng = RandomStream::new(SEED).derive("c4");
    let mut worst = 0.0f64;
    for n in 1..=2usize {
        let d = 1usize << n;
        for _ in 0..10 {
            let psi = StateVector::random(n, &mut rng).map_err(err)?;
            let keys = 1u64 << (2 * n);
            let mut rho = vec![Complex64::new(0.0, 0.0); d * d];
            let mut padded = Vec::new();
            for k in 0..keys {
                let by_hand = pad_by_hand(&psi, k, n);
                let lib = qotp_encrypt(&psi, &QotpKey::new(Bits::from_u64(k, 2 * n)).map_err(err)?).map_err(err)?;
                if lib.amplitudes().iter().zip(&by_hand).any(|(x, y)| (x - y).norm() > 1e-12) {
                    return Err(format!("pad with key {k:0w$b} disagrees with the hand-built pad", w = 2 * n));
                }
                for r in 0..d {
                    for c in 0..d {
                        rho[r * d + c] += by_hand[r] * by_hand[c].conj() / keys as f64;
                    }
                }
                padded.push(lib);
            }
            // ‖ρ − I/d‖₁ ≤ √d ‖ρ − I/d‖_F, so this bounds the trace distance from above.
            let frob = (0..d * d)
                .map(|i| (rho[i] - if i % (d + 1) == 0 { 1.0 / d as f64 } else { 0.0 }).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let bound = 0.5 * (d as f64).sqrt() * frob;
            let lib = DensityMatrix::average_of(&padded)
                .map_err(err)?
                .trace_distance(&DensityMatrix::maximally_mixed(d))
                .map_err(err)?;
            worst = worst.max(bound).max(lib);
        }
    }
    if worst > 1e-10 {
        return Err(format!("trace distance {worst:e}"));
    }
    Ok(format!("10 states each for n_msg=1,2, max trace distance {worst:.1e}"))
}

fn honest_sessions() -> Outcome {
    let mut notes = Vec::new();
    for n_msg in [1usize, 2] {
        let mut worst = 1.0f64;
        for seed in 0..100u64 {
            let config =
                SessionConfig { n_msg, master_seed: SEED + seed, seq_num: seed + 1, ..SessionConfig::default() };
            let setup = setup_keys(&config).map_err(err)?;
            let message = setup.random_message().map_err(err)?;
            let v = run_session(setup, &message, &mut NoTap).map_err(err)?.verdict;
            if !v.accepted || v.e_count != 0 || v.exact_failures != 0 {
                return Err(format!("n_msg={n_msg} seed {seed}: {:?}, {} failed blocks", v.reason, v.e_count));
            }
            let f = v.recovered_state.ok_or("no recovered state")?.fidelity(&message).map_err(err)?;
            worst = worst.min(f);
        }
        if worst < 1.0 - 1e-10 {
            return Err(format!("n_msg={n_msg}: recovered fidelity {worst}"));
        }
        notes.push(format!("n_msg={n_msg}: 100/100 accepted, fidelity ≥ 1-{:.1e}", 1.0 - worst));
    }
    Ok(notes.join("; "))
}

fn substitute_state() -> Outcome {
    let trials = 10_000u64;
    let config = SessionConfig::default();
    let code = cell_code(SEED, &config).map_err(err)?;
    let outcomes = run_trials(&config, &code, Strategy::SubstituteState, SEED, trials).map_err(err)?;
    let accepted = outcomes.iter().filter(|o| o.forged_accepted).count() as u64;
    let rate = accepted as f64 / trials as f64;
    let p = 1.0 / 16.0;
    let tol = 3.0 * sigma(p, trials);
    if (rate - p).abs() > tol {
        return Err(format!("acceptance {rate}, expected {p} ± {tol:.4}"));
    }
    Ok(format!("acceptance {accepted}/{trials} = {rate:.4}, expected 1/16 ± {tol:.4}; detection {:.4}", 1.0 - rate))
}

fn forgery_bound() -> Outcome {
    let trials = 100_000u64;
    let config = SessionConfig {
        w: 4,
        c_rate: 4,
        target_delta: 0.5,
        comparison: ComparisonMode::Exact,
        ..SessionConfig::default()
    };
    let code = cell_code(SEED, &config).map_err(err)?;
    if code.m() != 16 {
        return Err(format!("m = {}", code.m()));
    }
    let mut notes = Vec::new();
    // ⌈log₂16⌉ = 4 = w, so one copy already leaks the whole string.
    for (t, p) in [(0usize, 1.0 / 64.0), (1, 0.25)] {
        let outcomes =
            run_trials(&config, &code, Strategy::ForgePartialKey { t }, SEED ^ t as u64, trials).map_err(err)?;
        let wins = outcomes.iter().filter(|o| o.forged_accepted).count() as u64;
        let rate = wins as f64 / trials as f64;
        let limit = p + 3.0 * sigma(p, trials);
        if rate > limit {
            return Err(format!("t={t}: rate {rate} > {limit}"));
        }
        notes.push(format!("t={t}: {wins}/{trials} = {rate:.5} ≤ {limit:.5}"));
    }
    Ok(notes.join("; "))
}

fn dispute_resolution() -> Outcome {
    let config = SessionConfig::default();
    let code = cell_code(SEED, &config).map_err(err)?;
    for seed in 0..100u64 {
        let cfg = SessionConfig { master_seed: SEED + seed, ..config.clone() };
        let v = alice_repudiation(&cfg, code.clone()).map_err(err)?;
        if v != DisputeVerdict::AliceCheating {
            return Err(format!("repudiation seed {seed}: {v:?}"));
        }
    }
    let runs = 10_000u64;
    let caught = (0..runs)
        .into_par_iter()
        .map(|seed| {
            let cfg = SessionConfig { master_seed: SEED + 1_000 + seed, ..config.clone() };
            bob_fabrication(&cfg, code.clone()).map(|v| v == DisputeVerdict::ForgedByBobOrOther)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?
        .into_iter()
        .filter(|&c| c)
        .count() as u64;
    let d2 = code.delta() * code.delta();
    let floor = 1.0 - ((1.0 + d2) / 2.0).powi(2 * config.n_msg as i32);
    let limit = floor - 3.0 * sigma(floor, runs);
    let rate = caught as f64 / runs as f64;
    if rate < limit {
        return Err(format!("fabrication caught {rate}, need ≥ {limit}"));
    }
    Ok(format!("repudiation 100/100; fabrication caught {caught}/{runs} = {rate:.4} ≥ {limit:.4}"))
}

fn determinism() -> Outcome {
    let plan = ExperimentPlan {
        schema_version: SCHEMA_VERSION,
        master_seed: 11,
        trials: 300,
        grid: Grid { n_msg: vec![1, 2], w: vec![4], t: vec![0, 1], ..Grid::default() },
        strategies: vec![
            StrategyName::Honest,
            StrategyName::SubstituteState,
            StrategyName::SubstituteStateBackdoor,
            StrategyName::ForgePartialKey,
        ],
        target_delta: 0.5,
        max_cells: 64,
        assert: true,
    };
    let run = |threads| run_plan(&plan, 99, &RunOptions { threads: Some(threads), timings: false }).map_err(err);
    let (a, b, c): (Report, Report, Report) = (run(1)?, run(1)?, run(3)?);
    let dirs: Vec<tempfile::TempDir> = (0..2).map(|_| tempfile::tempdir().map_err(err)).collect::<Result<_, _>>()?;
    a.write(dirs[0].path()).map_err(err)?;
    b.write(dirs[1].path()).map_err(err)?;
    for name in [qsig::report::REPORT_FILE, qsig::report::SUMMARY_FILE] {
        let x = std::fs::read(dirs[0].path().join(name)).map_err(err)?;
        let y = std::fs::read(dirs[1].path().join(name)).map_err(err)?;
        if x != y {
            return Err(format!("{name} differs between reruns"));
        }
    }
    if a.to_json() != c.to_json() || a.to_csv() != c.to_csv() {
        return Err("report depends on the thread count".into());
    }

    let config = SessionConfig { n_msg: 2, master_seed: 5, ..SessionConfig::default() };
    let (_, t1) = transcript::honest_transcript(&config).map_err(err)?;
    let (_, t2) = transcript::honest_transcript(&config).map_err(err)?;
    if t1 != t2 {
        return Err("transcripts differ between reruns".into());
    }
    let path = dirs[0].path().join("t.jsonl");
    transcript::write(&config, &path).map_err(err)?;
    let lines = transcript::verify(&config, &path).map_err(err)?;
    Ok(format!(
        "{} cells, report {} bytes identical across reruns and 1/3 threads; transcript {lines} lines replays",
        a.cells.len(),
        a.to_json().len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "fingerprint overlap bound", Some(Duration::from_secs(10)), fingerprint_overlap_bound),
        (2, "swap-test statistics", Some(Duration::from_secs(30)), swap_test_statistics),
        (3, "stabilizer completeness", Some(Duration::from_secs(5)), stabilizer_completeness),
        (4, "one-time pad mixing", Some(Duration::from_secs(5)), qotp_mixing),
        (5, "honest sessions accept", Some(Duration::from_secs(60)), honest_sessions),
        (6, "substitute-state attack", Some(Duration::from_secs(60)), substitute_state),
        (7, "forgery bound", Some(Duration::from_secs(180)), forgery_bound),
        (8, "dispute resolution", Some(Duration::from_secs(60)), dispute_resolution),
        (9, "determinism", None, determinism),
    ];
    let mut failed = 0;
    for (id, name, limit, f) in criteria {
        let start = Instant::now();
        let result = f();
        let took = start.elapsed();
        let result = match (result, limit) {
            (Ok(d), Some(l)) if took > l => Err(format!("{d}; took {took:.1?}, limit {l:?}")),
            (r, _) => r,
        };
        match result {
            Ok(d) => println!("PASS criterion {id} ({name}): {d} [{took:.1?}]"),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {id} ({name}): {d} [{took:.1?}]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
