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

//! Arbitration after a completed session.

use super::session::{run_session, setup_keys_with_code, NoTap};
use super::{compare_pairwise, BobClaim, ComparisonMode, SessionConfig, TrentEvidence};
use crate::error::{Error, Result};
use crate::fingerprint::CodeSpec;
use crate::rng::RandomStream;
use crate::state::StateVector;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum DisputeVerdict {
    /// Bob's claim matches Trent's evidence, so Alice did sign.
    AliceCheating,
    ForgedByBobOrOther,
    /// Trent retained nothing to compare against.
    Unresolvable,
}

/// Trent compares Bob's copy with the one he kept and Bob's syndrome with
/// his own. Everything must match for the signature to stand.
pub fn resolve_dispute(
    claim: &BobClaim,
    evidence: Option<&TrentEvidence>,
    mode: ComparisonMode,
    rng: &mut RandomStream,
) -> Result<DisputeVerdict> {
    let Some(evidence) = evidence else {
        return Ok(DisputeVerdict::Unresolvable);
    };
    if claim.s_b != evidence.s_t || claim.signature.len() != evidence.signature.len() {
        return Ok(DisputeVerdict::ForgedByBobOrOther);
    }
    let cmp = compare_pairwise(&claim.signature, &evidence.signature, mode, rng)?;
    Ok(if cmp.failed == 0 { DisputeVerdict::AliceCheating } else { DisputeVerdict::ForgedByBobOrOther })
}

/// An honest session after which Alice denies signing. Bob presents his
/// genuine copy and syndrome.
pub fn alice_repudiation(config: &SessionConfig, code: CodeSpec) -> Result<DisputeVerdict> {
    let setup = setup_keys_with_code(config, code)?;
    let message = setup.random_message()?;
    let outcome = run_session(setup, &message, &mut NoTap)?;
    let claim = outcome.bob_claim.ok_or(Error::OutOfOrder("Bob holds no claim"))?;
    let mut rng = RandomStream::new(config.master_seed).derive("dispute");
    resolve_dispute(&claim, outcome.trent_evidence.as_ref(), config.comparison, &mut rng)
}

/// An honest session after which Bob presents random states in place of
/// his signature copy, with his true syndrome.
pub fn bob_fabrication(config: &SessionConfig, code: CodeSpec) -> Result<DisputeVerdict> {
    let setup = setup_keys_with_code(config, code)?;
    let message = setup.random_message()?;
    let outcome = run_session(setup, &message, &mut NoTap)?;
    let mut claim = outcome.bob_claim.ok_or(Error::OutOfOrder("Bob holds no claim"))?;
    let root = RandomStream::new(config.master_seed);
    let mut fab = root.derive("fabrication");
    for s in claim.signature.iter_mut() {
        *s = StateVector::random(s.num_qubits(), &mut fab)?;
    }
    resolve_dispute(&claim, outcome.trent_evidence.as_ref(), config.comparison, &mut root.derive("dispute"))
}
