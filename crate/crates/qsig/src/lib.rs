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

//! Experiment harness for `qsig-core`: plans, parallel Monte Carlo runs,
//! reports, the self-test battery and session transcripts.

pub mod error;
pub mod plan;
pub mod report;
pub mod runner;
pub mod selftest;
pub mod transcript;

pub use error::{exit, CliError, Result};
pub use plan::ExperimentPlan;
pub use report::Report;
pub use runner::{run_plan, RunOptions};
