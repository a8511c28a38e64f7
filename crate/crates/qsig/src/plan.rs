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

//! Experiment plans: a parameter grid crossed with attack strategies.

use std::path::Path;

use qsig_core::adversary::Strategy;
use qsig_core::protocol::{ComparisonMode, SessionConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default = "one")]
    pub n_msg: Vec<usize>,
    #[serde(default = "default_w")]
    pub w: Vec<usize>,
    #[serde(default = "default_c_rate")]
    pub c_rate: Vec<usize>,
    /// Public-key copies per state; only forgery cells use it.
    #[serde(default = "zero")]
    pub t: Vec<usize>,
    #[serde(default = "zero_f")]
    pub c_thresh: Vec<f64>,
    #[serde(default = "swap_only")]
    pub comparison: Vec<ComparisonMode>,
}

fn one() -> Vec<usize> {
    vec![1]
}
fn default_w() -> Vec<usize> {
    vec![SessionConfig::default().w]
}
fn default_c_rate() -> Vec<usize> {
    vec![SessionConfig::default().c_rate]
}
fn zero() -> Vec<usize> {
    vec![0]
}
fn zero_f() -> Vec<f64> {
    vec![0.0]
}
fn swap_only() -> Vec<ComparisonMode> {
    vec![ComparisonMode::SwapTest]
}
fn default_cap() -> usize {
    64
}
fn default_delta() -> f64 {
    SessionConfig::default().target_delta
}
fn yes() -> bool {
    true
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            n_msg: one(),
            w: default_w(),
            c_rate: default_c_rate(),
            t: zero(),
            c_thresh: zero_f(),
            comparison: swap_only(),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyName {
    Honest,
    SubstituteState,
    SubstituteStateBackdoor,
    ForgePartialKey,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub schema_version: u32,
    #[serde(default)]
    pub master_seed: u64,
    pub trials: u64,
    #[serde(default)]
    pub grid: Grid,
    pub strategies: Vec<StrategyName>,
    #[serde(default = "default_delta")]
    pub target_delta: f64,
    /// Upper bound on the number of cells.
    #[serde(default = "default_cap")]
    pub max_cells: usize,
    /// Whether per-cell checks decide the exit code.
    #[serde(default = "yes")]
    pub assert: bool,
}

/// One fully specified point of the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub config: SessionConfig,
    pub strategy: Strategy,
}

impl ExperimentPlan {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let plan: ExperimentPlan =
            serde_json::from_str(&text).map_err(|source| CliError::Parse { path: path.into(), source })?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Usage(format!(
                "plan schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.trials == 0 {
            return Err(CliError::Usage("plan needs at least one trial per cell".into()));
        }
        if self.strategies.is_empty() {
            return Err(CliError::Usage("plan lists no strategies".into()));
        }
        let g = &self.grid;
        if [g.n_msg.len(), g.w.len(), g.c_rate.len(), g.t.len(), g.c_thresh.len(), g.comparison.len()].contains(&0) {
            return Err(CliError::Usage("every grid axis needs at least one value".into()));
        }
        let cells = self.cells()?;
        if cells.len() > self.max_cells {
            return Err(CliError::Usage(format!("plan expands to {} cells, cap is {}", cells.len(), self.max_cells)));
        }
        for c in &cells {
            c.config.validate()?;
        }
        Ok(())
    }

    /// Cartesian product in a fixed order; `t` multiplies forgery cells only.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        if !self.target_delta.is_finite() {
            return Err(CliError::Usage("target_delta must be finite".into()));
        }
        let g = &self.grid;
        let mut out = Vec::new();
        for &n_msg in &g.n_msg {
            for &w in &g.w {
                for &c_rate in &g.c_rate {
                    for (&c_thresh, &comparison) in
                        g.c_thresh.iter().flat_map(|c| g.comparison.iter().map(move |m| (c, m)))
                    {
                        for &name in &self.strategies {
                            let strategies: Vec<Strategy> = match name {
                                StrategyName::Honest => vec![Strategy::Honest],
                                StrategyName::SubstituteState => vec![Strategy::SubstituteState],
                                StrategyName::SubstituteStateBackdoor => vec![Strategy::SubstituteStateBackdoor],
                                StrategyName::ForgePartialKey => {
                                    g.t.iter().map(|&t| Strategy::ForgePartialKey { t }).collect()
                                }
                            };
                            for strategy in strategies {
                                let config = SessionConfig {
                                    n_msg,
                                    w,
                                    c_rate,
                                    c_thresh,
                                    target_delta: self.target_delta,
                                    comparison,
                                    master_seed: self.master_seed,
                                    ..SessionConfig::default()
                                };
                                out.push(Cell { index: out.len(), config, strategy });
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}
