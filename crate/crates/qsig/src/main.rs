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

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qsig::error::{exit, CliError, Result};
use qsig::selftest::{self, Mode};
use qsig::{run_plan, transcript, ExperimentPlan, RunOptions};

#[derive(Parser)]
#[command(name = "qsig", version, about = "Arbitrated quantum signature simulator and experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every cell of an experiment plan and write report.json and summary.csv.
    Run {
        #[arg(long)]
        plan: PathBuf,
        /// Overrides the plan's master_seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Record per-cell wall-clock time (reports stop being reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Run the invariant battery.
    Selftest {
        #[arg(long)]
        quick: bool,
    },
    /// Run one honest session and write its JSON-lines transcript.
    Transcript {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Compare the existing file at --out with a live replay instead of writing.
        #[arg(long)]
        verify: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { exit::SUCCESS as u8 });
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qsig: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { plan, seed, out, timings } => {
            let plan = ExperimentPlan::load(&plan)?;
            let seed = seed.unwrap_or(plan.master_seed);
            let report = run_plan(&plan, seed, &RunOptions::from_env(timings)?)?;
            report.write(&out)?;
            for c in &report.cells {
                println!(
                    "cell {:>3} {:<26} rate {:.6} [{:.6}, {:.6}] bound {} {}",
                    c.cell,
                    qsig::report::strategy_name(c.strategy),
                    c.rate,
                    c.wilson_low,
                    c.wilson_high,
                    c.analytic_bound.map_or("-".into(), |b| b.to_string()),
                    c.check.as_ref().map_or("", |k| if k.passed { "PASS" } else { "FAIL" }),
                );
            }
            let failed = report.failed_checks();
            if !failed.is_empty() {
                let ids: Vec<String> = failed.iter().map(|c| c.cell.to_string()).collect();
                return Err(CliError::Assertion(format!("cells {} failed their checks", ids.join(", "))));
            }
            Ok(())
        }
        Command::Selftest { quick } => {
            let results = selftest::run_all(if quick { Mode::Quick } else { Mode::Full });
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                return Err(CliError::Assertion(format!("{failed} suite(s) failed")));
            }
            Ok(())
        }
        Command::Transcript { config, out, verify } => {
            let config = transcript::load_config(&config)?;
            if verify {
                let n = transcript::verify(&config, &out)?;
                println!("{}: {n} messages match the live run", out.display());
            } else {
                let outcome = transcript::write(&config, &out)?;
                println!(
                    "{}: {} messages, verdict {}",
                    out.display(),
                    outcome.transcript.messages().len(),
                    if outcome.verdict.accepted { "accepted" } else { "rejected" }
                );
            }
            Ok(())
        }
    }
}
