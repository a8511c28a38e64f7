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

//! The three-party signing protocol.
//!
//! Parties are explicit state machines that exchange [`ProtocolMessage`]s.
//! The [`session`] engine wires them together and passes every message
//! through a [`ChannelTap`], which is where adversaries live.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fingerprint::{FingerprintForm, KeySampling, PublicKeys};
use crate::qcrypto::{Ciphertext, DerivedX};
use crate::rng::RandomStream;
use crate::stabilizer::{CodeFamilyKey, Syndrome, FAMILY_KEY_BITS};
use crate::state::StateVector;
use crate::swap::swap_test;

mod alice;
mod bob;
mod dispute;
pub mod session;
mod trent;

pub use alice::{Alice, SigningSecrets};
pub use bob::{Bob, BobClaim};
pub use dispute::{alice_repudiation, bob_fabrication, resolve_dispute, DisputeVerdict};
pub use session::{
    run_honest_session, run_session, setup_keys, setup_keys_with_code, ChannelTap, NoTap, SessionOutcome, SessionSetup,
};
pub use trent::{Trent, TrentEvidence};

/// How received signature states are compared.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum ComparisonMode {
    /// Single-shot swap tests, as a physical verifier would run them.
    #[default]
    SwapTest,
    /// Exact fidelity check, available only to a simulator.
    Exact,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default, deny_unknown_fields))]
pub struct SessionConfig {
    pub n_msg: usize,
    pub w: usize,
    pub c_rate: usize,
    pub target_delta: f64,
    /// Fraction of compared blocks allowed to fail.
    pub c_thresh: f64,
    pub seq_num: u64,
    pub master_seed: u64,
    pub fingerprint_form: FingerprintForm,
    pub key_sampling: KeySampling,
    pub comparison: ComparisonMode,
    /// Spare bits on top of the exact requirement of each classical key.
    pub key_reserve: usize,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            n_msg: 1,
            w: 8,
            c_rate: 4,
            target_delta: 0.625,
            c_thresh: 0.0,
            seq_num: 1,
            master_seed: 0,
            fingerprint_form: FingerprintForm::Register,
            key_sampling: KeySampling::DistinctPairs,
            comparison: ComparisonMode::SwapTest,
            key_reserve: 64,
        }
    }
}

/// Physical qubits per message qubit.
pub const BLOCK_QUBITS: usize = 5;

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_msg == 0 || self.n_msg * BLOCK_QUBITS > crate::state::DEFAULT_MAX_QUBITS {
            return bad(alloc::format!("n_msg must be in 1..=4, got {}", self.n_msg));
        }
        if !(0.0..1.0).contains(&self.c_thresh) {
            return bad(alloc::format!("c_thresh must lie in [0, 1), got {}", self.c_thresh));
        }
        if !(self.target_delta > 0.0 && self.target_delta < 1.0) {
            return bad(alloc::format!("target_delta must lie in (0, 1), got {}", self.target_delta));
        }
        if self.w == 0 || self.w > crate::fingerprint::MAX_INPUT_BITS || self.c_rate < 2 {
            return bad(alloc::format!("unsupported code parameters w={} c_rate={}", self.w, self.c_rate));
        }
        Ok(())
    }

    /// Signature positions, `2·n_msg`.
    pub fn positions(&self) -> usize {
        2 * self.n_msg
    }

    pub fn syndrome_len(&self) -> usize {
        4 * self.n_msg
    }

    /// Largest failed-block count that still passes.
    pub fn max_failures(&self) -> usize {
        // e > c·M rejects
        let limit = self.c_thresh * self.positions() as f64;
        (0..=self.positions()).take_while(|&e| e as f64 <= limit).last().unwrap_or(0)
    }

    pub fn k_fam_bits(&self) -> usize {
        FAMILY_KEY_BITS
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum Party {
    Alice,
    Bob,
    Trent,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MessageKind {
    QuantumPayload,
    SignatureCopies,
    C1,
    C2,
    C3,
    C4,
    DisputeRequest,
    DisputeVerdict,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum Payload {
    /// The encoded, padded message `π`.
    Quantum(StateVector),
    /// Signature copies, each a list of per-position fingerprint states.
    Signatures(Vec<Vec<StateVector>>),
    Classical(Ciphertext),
    Claim {
        signature: Vec<StateVector>,
        syndrome: Syndrome,
    },
    Verdict(DisputeVerdict),
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProtocolMessage {
    pub seq_num: u64,
    pub sender: Party,
    pub receiver: Party,
    pub kind: MessageKind,
    pub payload: Payload,
}

impl ProtocolMessage {
    pub fn new(seq_num: u64, sender: Party, receiver: Party, kind: MessageKind, payload: Payload) -> Self {
        ProtocolMessage { seq_num, sender, receiver, kind, payload }
    }

    pub(crate) fn check(&self, seq_num: u64, kind: MessageKind, sender: Party, receiver: Party) -> Result<()> {
        if self.seq_num != seq_num {
            return Err(Error::Malformed(alloc::format!("sequence number {} in session {seq_num}", self.seq_num)));
        }
        if self.kind != kind || self.sender != sender || self.receiver != receiver {
            return Err(Error::Malformed(alloc::format!(
                "expected {kind:?} {sender:?}->{receiver:?}, got {:?} {:?}->{:?}",
                self.kind,
                self.sender,
                self.receiver
            )));
        }
        Ok(())
    }

    pub(crate) fn ciphertext(&self) -> Result<&Ciphertext> {
        match &self.payload {
            Payload::Classical(c) => Ok(c),
            _ => Err(Error::Malformed(alloc::format!("{:?} must carry a ciphertext", self.kind))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Decision {
    pub party: Party,
    pub event: String,
}

/// Everything that crossed a channel, plus what each party decided.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SessionTranscript {
    messages: Vec<ProtocolMessage>,
    decisions: Vec<Decision>,
}

impl SessionTranscript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_message(&mut self, msg: ProtocolMessage) {
        self.messages.push(msg);
    }

    pub fn log(&mut self, party: Party, event: impl Into<String>) {
        self.decisions.push(Decision { party, event: event.into() });
    }

    pub fn messages(&self) -> &[ProtocolMessage] {
        &self.messages
    }

    pub fn decisions(&self) -> &[Decision] {
        &self.decisions
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum VerdictReason {
    Accepted,
    /// Trent's blockwise comparison exceeded the threshold.
    TrentRejectedSignature,
    SyndromeMismatch,
    SignatureMismatch,
    DecodeFailure,
    MalformedMessage,
    MissingMessage,
    KeyExhausted,
}

impl VerdictReason {
    /// Maps a party-level error to the abort it causes.
    pub fn from_error(e: &Error) -> Self {
        match e {
            Error::DecodeFailure { .. } => VerdictReason::DecodeFailure,
            Error::KeyExhausted { .. } => VerdictReason::KeyExhausted,
            Error::OutOfOrder(_) => VerdictReason::MissingMessage,
            _ => VerdictReason::MalformedMessage,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Verdict {
    pub accepted: bool,
    /// Failed blocks under the configured comparison mode.
    pub e_count: usize,
    /// Failed blocks by exact fidelity, reported alongside.
    pub exact_failures: usize,
    pub reason: VerdictReason,
    pub recovered_state: Option<StateVector>,
}

impl Verdict {
    pub fn rejected(reason: VerdictReason) -> Self {
        Verdict { accepted: false, e_count: 0, exact_failures: 0, reason, recovered_state: None }
    }
}

/// Published fingerprint states. Honest verifiers may draw any number of
/// copies; adversary access is metered in the adversary module instead.
#[derive(Clone, Debug, PartialEq)]
pub struct PublicRegistry {
    keys: PublicKeys,
}

impl PublicRegistry {
    pub fn new(keys: PublicKeys) -> Self {
        PublicRegistry { keys }
    }

    pub fn positions(&self) -> usize {
        self.keys.positions()
    }

    /// Total number of published states.
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn copy_of(&self, i: usize, j: bool) -> StateVector {
        self.keys.get(i, j).clone()
    }

    /// `⊗_i |y_{i,X_i}⟩`, kept as one state per position.
    pub fn signature_for(&self, big_x: &DerivedX) -> Result<Vec<StateVector>> {
        if big_x.len() != self.positions() {
            return Err(Error::DimensionMismatch { expected: self.positions(), actual: big_x.len() });
        }
        Ok((0..big_x.len()).map(|i| self.copy_of(i, big_x.get(i))).collect())
    }
}

/// Per-block failures of a three-way comparison.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct BlockComparison {
    pub failed: usize,
    pub exact_failed: usize,
}

/// Compares two received copies with each other and with `reference`, block
/// by block. A block fails if any of its three tests fails.
pub(crate) fn compare_blocks(
    a: &[StateVector],
    b: &[StateVector],
    reference: &[StateVector],
    mode: ComparisonMode,
    rng: &mut RandomStream,
) -> Result<BlockComparison> {
    let n = reference.len();
    if a.len() != n || b.len() != n {
        return Err(Error::Malformed(alloc::format!(
            "signature copies of {} and {} blocks, expected {n}",
            a.len(),
            b.len()
        )));
    }
    let mut out = BlockComparison::default();
    for i in 0..n {
        let pairs = [(&a[i], &b[i]), (&a[i], &reference[i]), (&b[i], &reference[i])];
        let mut exact_ok = true;
        for (p, q) in pairs {
            exact_ok &= p.fidelity(q)? >= 1.0 - crate::AMPLITUDE_TOLERANCE;
        }
        let ok = match mode {
            ComparisonMode::Exact => exact_ok,
            ComparisonMode::SwapTest => {
                let mut all = true;
                for (p, q) in pairs {
                    all &= swap_test(p, q, rng)?;
                }
                all
            }
        };
        out.failed += (!ok) as usize;
        out.exact_failed += (!exact_ok) as usize;
    }
    Ok(out)
}

/// Two-way variant used when only one received copy exists.
pub(crate) fn compare_pairwise(
    a: &[StateVector],
    reference: &[StateVector],
    mode: ComparisonMode,
    rng: &mut RandomStream,
) -> Result<BlockComparison> {
    if a.len() != reference.len() {
        return Err(Error::Malformed(alloc::format!("copy of {} blocks, expected {}", a.len(), reference.len())));
    }
    let mut out = BlockComparison::default();
    for (p, q) in a.iter().zip(reference) {
        let exact_ok = p.fidelity(q)? >= 1.0 - crate::AMPLITUDE_TOLERANCE;
        let ok = match mode {
            ComparisonMode::Exact => exact_ok,
            ComparisonMode::SwapTest => swap_test(p, q, rng)?,
        };
        out.failed += (!ok) as usize;
        out.exact_failed += (!exact_ok) as usize;
    }
    Ok(out)
}

pub(crate) fn family_key(bits: &crate::bits::Bits) -> Result<CodeFamilyKey> {
    if bits.len() != FAMILY_KEY_BITS {
        return Err(Error::Malformed(alloc::format!("code family key of {} bits", bits.len())));
    }
    Ok(CodeFamilyKey::new(bits.clone()))
}
