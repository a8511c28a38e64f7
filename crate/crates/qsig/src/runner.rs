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

//! Plan execution.
//!
//! Trials run on a rayon pool, but each outcome is a pure function of
//! `(cell seed, trial index)` and results are collected in trial order, so
//! the report does not depend on scheduling or on the thread count.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::time::Instant;

use qsig_core::adversary::{run_trial, AttackOutcome, Estimate, Strategy};
use qsig_core::fingerprint::{build_code, CodeSpec};
use qsig_core::protocol::{ComparisonMode, SessionConfig};
use qsig_core::stats::binomial_sigma;
use qsig_core::RandomStream;
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::plan::{Cell, ExperimentPlan};
use crate::report::{CellParams, CellReport, Check, EnvironmentStamp, Report, REPORT_SCHEMA_VERSION};

/// Overrides the worker count.
pub const THREADS_ENV: &str = "QSIG_THREADS";

/// Width of the acceptance band, in binomial standard deviations.
pub const SIGMAS: f64 = 3.0;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// `None` uses the global rayon pool.
    pub threads: Option<usize>,
    pub timings: bool,
}

impl RunOptions {
    /// Reads [`THREADS_ENV`]. Zero or garbage is a usage error.
    pub fn from_env(timings: bool) -> Result<Self> {
        let threads = match std::env::var(THREADS_ENV) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n > 0 => Some(n),
                _ => return Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
            },
            Err(_) => None,
        };
        Ok(RunOptions { threads, timings })
    }
}

/// Code shared by every cell with the same `(w, c_rate)`.
pub fn cell_code(seed: u64, config: &SessionConfig) -> Result<CodeSpec> {
    let mut rng = RandomStream::new(seed).derive(&format!("code/{}/{}", config.w, config.c_rate));
    Ok(build_code(config.w, config.c_rate, config.target_delta, &mut rng)?)
}

pub fn cell_seed(seed: u64, index: usize) -> u64 {
    RandomStream::derive_seed(seed, &format!("cell/{index}"))
}

/// Runs `trials` sessions of one cell in parallel, returned in trial order.
pub fn run_trials(
    config: &SessionConfig,
    code: &CodeSpec,
    strategy: Strategy,
    seed: u64,
    trials: u64,
) -> Result<Vec<AttackOutcome>> {
    (0..trials)
        .into_par_iter()
        .map(|i| run_trial(config, code, strategy, seed, i))
        .collect::<qsig_core::Result<Vec<_>>>()
        .map_err(CliError::from)
}

pub fn run_plan(plan: &ExperimentPlan, seed: u64, opts: &RunOptions) -> Result<Report> {
    plan.validate()?;
    match opts.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {n} worker threads: {e}")))?;
            pool.install(|| run_cells(plan, seed, opts.timings))
        }
        None => run_cells(plan, seed, opts.timings),
    }
}

fn run_cells(plan: &ExperimentPlan, seed: u64, timings: bool) -> Result<Report> {
    let mut codes: BTreeMap<(usize, usize), CodeSpec> = BTreeMap::new();
    let mut cells = Vec::new();
    for cell in plan.cells()? {
        let key = (cell.config.w, cell.config.c_rate);
        let code = match codes.entry(key) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(cell_code(seed, &cell.config)?),
        };
        let start = Instant::now();
        let outcomes = run_trials(&cell.config, code, cell.strategy, cell_seed(seed, cell.index), plan.trials)?;
        let runtime_ms = timings.then(|| start.elapsed().as_millis() as u64);
        let mut report = summarize(&cell, code, &outcomes, runtime_ms);
        if !plan.assert {
            report.check = None;
        }
        cells.push(report);
    }
    let all_checks_passed = cells.iter().all(|c| c.check.as_ref().is_none_or(|k| k.passed));
    Ok(Report {
        schema_version: REPORT_SCHEMA_VERSION,
        seed,
        environment: EnvironmentStamp::current(),
        plan: plan.clone(),
        cells,
        all_checks_passed,
    })
}

fn summarize(cell: &Cell, code: &CodeSpec, outcomes: &[AttackOutcome], runtime_ms: Option<u64>) -> CellReport {
    let cfg = &cell.config;
    let est = Estimate::from_outcomes(cell.strategy, cfg, code.m(), outcomes);
    let mut detections = BTreeMap::new();
    for stage in outcomes.iter().filter_map(|o| o.stage) {
        *detections.entry(stage).or_insert(0u64) += 1;
    }
    let detected = outcomes.iter().filter(|o| o.detected).count();
    CellReport {
        cell: cell.index,
        strategy: cell.strategy,
        params: CellParams {
            n_msg: cfg.n_msg,
            w: cfg.w,
            c_rate: cfg.c_rate,
            m: code.m(),
            delta: code.delta(),
            t: match cell.strategy {
                Strategy::ForgePartialKey { t } => Some(t),
                _ => None,
            },
            c_thresh: cfg.c_thresh,
            comparison: cfg.comparison,
        },
        check: check(&est, cfg),
        trials: est.trials,
        successes: est.successes,
        rate: est.rate,
        wilson_low: est.wilson_low,
        wilson_high: est.wilson_high,
        analytic_bound: est.analytic_bound,
        boundary: est.boundary,
        detection_rate: if outcomes.is_empty() { 0.0 } else { detected as f64 / outcomes.len() as f64 },
        detections,
        runtime_ms,
    }
}

/// The pass rule a cell is held to, if any.
///
/// Forgery bounds hold for an exact verifier with zero tolerance only; a
/// single-shot swap test lets a wrong state through half the time, so swap
/// cells are reported without a verdict.
pub fn check(est: &Estimate, cfg: &SessionConfig) -> Option<Check> {
    let n = est.trials;
    match est.strategy {
        Strategy::Honest | Strategy::SubstituteStateBackdoor => {
            Some(Check { rule: "all sessions accepted".into(), passed: est.successes == n })
        }
        Strategy::SubstituteState => {
            let p = est.analytic_bound?;
            let tol = SIGMAS * binomial_sigma(p, n);
            Some(Check { rule: format!("|rate - {p}| <= {tol}"), passed: (est.rate - p).abs() <= tol })
        }
        Strategy::ForgePartialKey { .. } => {
            if cfg.comparison != ComparisonMode::Exact || cfg.c_thresh != 0.0 {
                return None;
            }
            let p = est.analytic_bound?;
            let limit = p + SIGMAS * binomial_sigma(p, n);
            Some(Check { rule: format!("rate <= {limit}"), passed: est.rate <= limit })
        }
    }
}
