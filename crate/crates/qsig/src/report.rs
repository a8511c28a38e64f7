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

//! Report formats. JSON for machines, CSV for plotting.
//!
//! CSV columns, in order:
//! `cell,strategy,n_msg,w,c_rate,m,t,c_thresh,comparison,trials,successes,rate,ci_low,ci_high,bound,detection_rate,check,runtime_ms`.
//! `t` is empty for strategies that ignore it, `bound` is empty where no
//! analytic bound applies, `check` is `pass`, `fail` or empty, and
//! `runtime_ms` is empty unless timings were requested.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use qsig_core::adversary::{DetectionStage, Estimate, Strategy};
use qsig_core::protocol::ComparisonMode;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::plan::ExperimentPlan;

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const REPORT_FILE: &str = "report.json";
pub const SUMMARY_FILE: &str = "summary.csv";

pub const CSV_HEADER: &str = "cell,strategy,n_msg,w,c_rate,m,t,c_thresh,comparison,trials,successes,rate,ci_low,ci_high,bound,detection_rate,check,runtime_ms";

/// Nothing here depends on the host, the clock or the thread count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentStamp {
    pub tool: String,
    pub version: String,
    pub rng: String,
}

impl EnvironmentStamp {
    pub fn current() -> Self {
        EnvironmentStamp {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            rng: "chacha8".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellParams {
    pub n_msg: usize,
    pub w: usize,
    pub c_rate: usize,
    pub m: usize,
    pub delta: f64,
    pub t: Option<usize>,
    pub c_thresh: f64,
    pub comparison: ComparisonMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub rule: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub cell: usize,
    pub strategy: Strategy,
    pub params: CellParams,
    pub trials: u64,
    /// Sessions Bob accepted.
    pub successes: u64,
    pub rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub analytic_bound: Option<f64>,
    pub boundary: bool,
    pub detection_rate: f64,
    pub detections: BTreeMap<DetectionStage, u64>,
    pub check: Option<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl CellReport {
    pub fn estimate(&self) -> Estimate {
        Estimate {
            strategy: self.strategy,
            trials: self.trials,
            successes: self.successes,
            rate: self.rate,
            wilson_low: self.wilson_low,
            wilson_high: self.wilson_high,
            analytic_bound: self.analytic_bound,
            boundary: self.boundary,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub seed: u64,
    pub environment: EnvironmentStamp,
    pub plan: ExperimentPlan,
    pub cells: Vec<CellReport>,
    pub all_checks_passed: bool,
}

impl Report {
    pub fn failed_checks(&self) -> Vec<&CellReport> {
        self.cells.iter().filter(|c| c.check.as_ref().is_some_and(|k| !k.passed)).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serialisable");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for c in &self.cells {
            let p = &c.params;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                c.cell,
                strategy_name(c.strategy),
                p.n_msg,
                p.w,
                p.c_rate,
                p.m,
                opt(p.t),
                p.c_thresh,
                match p.comparison {
                    ComparisonMode::SwapTest => "swap_test",
                    ComparisonMode::Exact => "exact",
                },
                c.trials,
                c.successes,
                c.rate,
                c.wilson_low,
                c.wilson_high,
                opt(c.analytic_bound),
                c.detection_rate,
                c.check.as_ref().map_or("", |k| if k.passed { "pass" } else { "fail" }),
                opt(c.runtime_ms),
            );
        }
        out
    }

    /// Writes `report.json` and `summary.csv` into `dir`, creating it.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        for (name, body) in [(REPORT_FILE, self.to_json()), (SUMMARY_FILE, self.to_csv())] {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        }
        Ok(())
    }
}

pub fn strategy_name(s: Strategy) -> &'static str {
    match s {
        Strategy::Honest => "honest",
        Strategy::SubstituteState => "substitute_state",
        Strategy::SubstituteStateBackdoor => "substitute_state_backdoor",
        Strategy::ForgePartialKey { .. } => "forge_partial_key",
    }
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
