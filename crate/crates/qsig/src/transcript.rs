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

//! JSON-lines session transcripts: one protocol message per line.

use std::path::Path;

use qsig_core::protocol::{run_honest_session, ProtocolMessage, SessionConfig, SessionOutcome};

use crate::error::{CliError, Result};

/// Messages in a completed honest session.
pub const HONEST_MESSAGE_COUNT: usize = 7;

pub fn load_config(path: &Path) -> Result<SessionConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let config: SessionConfig =
        serde_json::from_str(&text).map_err(|source| CliError::Parse { path: path.into(), source })?;
    config.validate()?;
    Ok(config)
}

pub fn to_jsonl(messages: &[ProtocolMessage]) -> String {
    let mut out = String::new();
    for m in messages {
        out.push_str(&serde_json::to_string(m).expect("messages are always serialisable"));
        out.push('\n');
    }
    out
}

pub fn honest_transcript(config: &SessionConfig) -> Result<(SessionOutcome, String)> {
    let outcome = run_honest_session(config)?;
    let text = to_jsonl(outcome.transcript.messages());
    Ok((outcome, text))
}

pub fn write(config: &SessionConfig, out: &Path) -> Result<SessionOutcome> {
    let (outcome, text) = honest_transcript(config)?;
    std::fs::write(out, text).map_err(|e| CliError::io(out, e))?;
    Ok(outcome)
}

/// Replays the session and compares it line by line with the file.
pub fn verify(config: &SessionConfig, path: &Path) -> Result<usize> {
    let recorded = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let (_, live) = honest_transcript(config)?;
    let (rec, liv): (Vec<&str>, Vec<&str>) = (recorded.lines().collect(), live.lines().collect());
    for (i, line) in rec.iter().enumerate() {
        serde_json::from_str::<ProtocolMessage>(line).map_err(|e| {
            CliError::Assertion(format!("{}: line {} is not a protocol message: {e}", path.display(), i + 1))
        })?;
        if liv.get(i) != Some(line) {
            return Err(CliError::Assertion(format!("{}: line {} differs from the live run", path.display(), i + 1)));
        }
    }
    if rec.len() != liv.len() {
        return Err(CliError::Assertion(format!(
            "{}: {} messages recorded, live run has {}",
            path.display(),
            rec.len(),
            liv.len()
        )));
    }
    Ok(rec.len())
}
