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

//! Channel-tap adversaries and Monte Carlo estimation.
//!
//! Eve's access to Alice's secret strings goes through [`HolevoOracle`],
//! which hands out exactly `t·⌈log₂ m⌉` uniformly chosen bits of each one.
//! That is the most an adversary holding `t` copies of every public state
//! can extract, so measured rates upper-bound any concrete measurement.

use alloc::vec::Vec;

use crate::bits::Bits;
use crate::error::Result;
use crate::fingerprint::{ceil_log2, CodeSpec, FingerprintForm, SecretKey};
use crate::protocol::session::{run_session, run_session_with_backdoor, setup_keys_with_code, SessionSetup};
use crate::protocol::{
    ChannelTap, MessageKind, Party, Payload, ProtocolMessage, SessionConfig, SigningSecrets, Verdict, VerdictReason,
    BLOCK_QUBITS,
};
use crate::qcrypto::{qotp_encrypt, QotpKey};
use crate::rng::RandomStream;
use crate::stabilizer::{derive_code, BlockCode};
use crate::state::StateVector;
use crate::stats::wilson_interval;

/// Bits extractable from `t` copies of an `m`-dimensional fingerprint.
pub fn holevo_budget(t: usize, m: usize) -> usize {
    t * ceil_log2(m)
}

/// Known bits of one secret string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeakedKey {
    /// Sorted, distinct positions.
    pub positions: Vec<usize>,
    pub values: Bits,
}

impl LeakedKey {
    /// Fills the unknown positions uniformly at random.
    pub fn guess(&self, w: usize, rng: &mut RandomStream) -> SecretKey {
        let mut bits = rng.bits(w);
        for (&p, v) in self.positions.iter().zip(self.values.iter()) {
            bits.set(p, v);
        }
        SecretKey::new(bits)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AdversaryKnowledge {
    /// Messages seen on tapped channels, in order.
    pub intercepted: Vec<ProtocolMessage>,
    /// Public-key copies consumed per state.
    pub t: usize,
    /// `revealed[i][j]` leaks from `u_{i,j}`.
    pub revealed: Vec<[LeakedKey; 2]>,
}

impl AdversaryKnowledge {
    pub fn revealed_bits_per_key(&self) -> usize {
        self.revealed.first().map(|k| k[0].positions.len()).unwrap_or(0)
    }
}

/// Meters Eve's access to the secret strings behind the public states.
pub struct HolevoOracle<'a> {
    setup: &'a SessionSetup,
    t: usize,
}

impl<'a> HolevoOracle<'a> {
    pub fn new(setup: &'a SessionSetup, t: usize) -> Self {
        HolevoOracle { setup, t }
    }

    pub fn budget(&self) -> usize {
        holevo_budget(self.t, self.setup.code().m())
    }

    /// `min(budget, w)` uniformly chosen positions of every secret string.
    pub fn leak(&self, rng: &mut RandomStream) -> Vec<[LeakedKey; 2]> {
        let w = self.setup.code().w();
        let b = self.budget().min(w);
        let secret = self.setup.secret_keys();
        let mut leak_one = |u: &SecretKey| {
            let mut order: Vec<usize> = (0..w).collect();
            rng.shuffle(&mut order);
            let mut positions = order[..b].to_vec();
            positions.sort_unstable();
            let values = positions.iter().map(|&p| u.bits()[p]).collect();
            LeakedKey { positions, values }
        };
        (0..secret.positions()).map(|i| [leak_one(secret.get(i, false)), leak_one(secret.get(i, true))]).collect()
    }
}

/// Where an attack was caught.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum DetectionStage {
    TrentSignatureCheck,
    BobSyndromeCheck,
    BobSignatureCheck,
    Decode,
    MalformedMessage,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct AttackOutcome {
    pub detected: bool,
    pub stage: Option<DetectionStage>,
    pub forged_accepted: bool,
}

impl AttackOutcome {
    pub fn from_verdict(v: &Verdict) -> Self {
        let stage = match v.reason {
            VerdictReason::Accepted => None,
            VerdictReason::TrentRejectedSignature => Some(DetectionStage::TrentSignatureCheck),
            VerdictReason::SyndromeMismatch => Some(DetectionStage::BobSyndromeCheck),
            VerdictReason::SignatureMismatch => Some(DetectionStage::BobSignatureCheck),
            VerdictReason::DecodeFailure => Some(DetectionStage::Decode),
            VerdictReason::MalformedMessage | VerdictReason::MissingMessage | VerdictReason::KeyExhausted => {
                Some(DetectionStage::MalformedMessage)
            }
        };
        AttackOutcome { detected: !v.accepted, stage, forged_accepted: v.accepted }
    }
}

fn is_alice_to_bob(msg: &ProtocolMessage, kind: MessageKind) -> bool {
    msg.kind == kind && msg.sender == Party::Alice && msg.receiver == Party::Bob
}

/// Replaces `π` on the Alice→Bob channel; everything else passes through.
pub struct SubstituteTap {
    replacement: Replacement,
    pub knowledge: AdversaryKnowledge,
}

enum Replacement {
    /// `τ = qotp(eve_state, x_E)` with no code structure.
    Blind { eve_state: StateVector, x_e: QotpKey },
    /// Encodes a chosen message with Alice's `(k, s)`, once revealed.
    Backdoor { message: StateVector, secrets: Option<SigningSecrets> },
}

impl SubstituteTap {
    pub fn blind(eve_state: StateVector, x_e: QotpKey) -> Self {
        SubstituteTap { replacement: Replacement::Blind { eve_state, x_e }, knowledge: AdversaryKnowledge::default() }
    }

    pub fn backdoor(message: StateVector) -> Self {
        SubstituteTap {
            replacement: Replacement::Backdoor { message, secrets: None },
            knowledge: AdversaryKnowledge::default(),
        }
    }

    fn forge_payload(&self) -> Result<Option<StateVector>> {
        match &self.replacement {
            Replacement::Blind { eve_state, x_e } => Ok(Some(qotp_encrypt(eve_state, x_e)?)),
            Replacement::Backdoor { message, secrets: Some(s) } => {
                let blocks = BlockCode::new(derive_code(&s.k_fam)?, message.num_qubits())?;
                Ok(Some(blocks.apply_syndrome_offset(&blocks.encode(message)?, &s.s)?))
            }
            Replacement::Backdoor { secrets: None, .. } => Ok(None),
        }
    }
}

impl ChannelTap for SubstituteTap {
    fn intercept(&mut self, mut msg: ProtocolMessage, _rng: &mut RandomStream) -> ProtocolMessage {
        self.knowledge.intercepted.push(msg.clone());
        if is_alice_to_bob(&msg, MessageKind::QuantumPayload) {
            // A replacement of the wrong size is Eve's loss, not a crash.
            if let Ok(Some(tau)) = self.forge_payload() {
                msg.payload = Payload::Quantum(tau);
            }
        }
        msg
    }

    fn reveal_secrets(&mut self, secrets: &SigningSecrets) {
        if let Replacement::Backdoor { secrets: slot, .. } = &mut self.replacement {
            *slot = Some(secrets.clone());
        }
    }
}

/// Replaces every signature copy, to Bob and to Trent, with one forgery.
pub struct ForgeTap {
    forged: Vec<StateVector>,
    pub knowledge: AdversaryKnowledge,
}

impl ChannelTap for ForgeTap {
    fn intercept(&mut self, mut msg: ProtocolMessage, _rng: &mut RandomStream) -> ProtocolMessage {
        self.knowledge.intercepted.push(msg.clone());
        if msg.kind == MessageKind::SignatureCopies && msg.sender == Party::Alice {
            msg.payload = Payload::Signatures(alloc::vec![self.forged.clone(), self.forged.clone()]);
        }
        msg
    }
}

/// Substitutes `π` with `qotp(eve_state, x_E)` over the full physical
/// register and runs the session to completion.
pub fn attack_substitute_state(
    setup: SessionSetup,
    message: &StateVector,
    eve_state: StateVector,
    x_e: QotpKey,
) -> Result<(AttackOutcome, AdversaryKnowledge)> {
    let mut tap = SubstituteTap::blind(eve_state, x_e);
    let outcome = run_session(setup, message, &mut tap)?;
    Ok((AttackOutcome::from_verdict(&outcome.verdict), tap.knowledge))
}

/// Control: Eve is handed `(k, s)` and encodes her own message properly.
pub fn attack_substitute_state_backdoor(
    setup: SessionSetup,
    message: &StateVector,
    eve_message: StateVector,
) -> Result<(AttackOutcome, AdversaryKnowledge)> {
    let mut tap = SubstituteTap::backdoor(eve_message);
    let outcome = run_session_with_backdoor(setup, message, &mut tap)?;
    Ok((AttackOutcome::from_verdict(&outcome.verdict), tap.knowledge))
}

/// Eve learns the budgeted bits of every secret string, guesses the rest
/// and guesses `X`, then replaces all signature copies with the result.
pub fn attack_forge_with_partial_key(
    setup: SessionSetup,
    message: &StateVector,
    t: usize,
    rng: &mut RandomStream,
) -> Result<(AttackOutcome, AdversaryKnowledge)> {
    let revealed = HolevoOracle::new(&setup, t).leak(rng);
    let code = setup.code().clone();
    let form: FingerprintForm = setup.config().fingerprint_form;
    let big_x = rng.bits(setup.config().positions());
    let forged = (0..big_x.len())
        .map(|i| code.fingerprint_with_form(&revealed[i][big_x[i] as usize].guess(code.w(), rng), form))
        .collect::<Result<Vec<_>>>()?;
    let mut tap = ForgeTap { forged, knowledge: AdversaryKnowledge { intercepted: Vec::new(), t, revealed } };
    let outcome = run_session(setup, message, &mut tap)?;
    Ok((AttackOutcome::from_verdict(&outcome.verdict), tap.knowledge))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case", tag = "kind")
)]
pub enum Strategy {
    /// No tampering; the null control.
    Honest,
    SubstituteState,
    /// Substitution with Alice's `(k, s)` handed over; must always succeed.
    SubstituteStateBackdoor,
    ForgePartialKey {
        t: usize,
    },
}

impl Strategy {
    /// Analytic success probability for the configured parameters:
    /// `2^{-4n}` for blind substitution and `2^{-[(w - t⌈log₂m⌉)⁺ + 2n]}` for
    /// forgery. Controls have none.
    pub fn analytic_bound(&self, config: &SessionConfig, m: usize) -> Option<f64> {
        let n = config.n_msg as i32;
        match *self {
            Strategy::Honest | Strategy::SubstituteStateBackdoor => None,
            Strategy::SubstituteState => Some(exp2i(-4 * n)),
            Strategy::ForgePartialKey { t } => {
                let unknown = config.w.saturating_sub(holevo_budget(t, m)) as i32;
                Some(exp2i(-(unknown + 2 * n)))
            }
        }
    }

    /// The leak covers the whole string and only `X` is left to guess.
    pub fn is_boundary(&self, config: &SessionConfig, m: usize) -> bool {
        matches!(*self, Strategy::ForgePartialKey { t } if holevo_budget(t, m) >= config.w)
    }
}

fn exp2i(e: i32) -> f64 {
    if e >= 0 {
        (1u64 << e) as f64
    } else {
        1.0 / (1u64 << -e) as f64
    }
}

/// Seed of trial `index` in a run seeded with `seed`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    RandomStream::new(seed).fork(index).seed()
}

/// One independent session under `strategy`. Pure in its arguments.
pub fn run_trial(
    config: &SessionConfig,
    code: &CodeSpec,
    strategy: Strategy,
    seed: u64,
    index: u64,
) -> Result<AttackOutcome> {
    let trial = SessionConfig { master_seed: trial_seed(seed, index), seq_num: index + 1, ..config.clone() };
    let setup = setup_keys_with_code(&trial, code.clone())?;
    let message = setup.random_message()?;
    let mut eve = RandomStream::new(trial.master_seed).derive("eve");
    let n = trial.n_msg;
    Ok(match strategy {
        Strategy::Honest => {
            AttackOutcome::from_verdict(&run_session(setup, &message, &mut crate::protocol::NoTap)?.verdict)
        }
        Strategy::SubstituteState => {
            let eve_state = StateVector::random(BLOCK_QUBITS * n, &mut eve)?;
            let x_e = QotpKey::random(BLOCK_QUBITS * n, &mut eve);
            attack_substitute_state(setup, &message, eve_state, x_e)?.0
        }
        Strategy::SubstituteStateBackdoor => {
            let eve_message = StateVector::random(n, &mut eve)?;
            attack_substitute_state_backdoor(setup, &message, eve_message)?.0
        }
        Strategy::ForgePartialKey { t } => attack_forge_with_partial_key(setup, &message, t, &mut eve)?.0,
    })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Estimate {
    pub strategy: Strategy,
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub analytic_bound: Option<f64>,
    /// Leak covers whole strings; the guessing model has degenerated.
    pub boundary: bool,
}

/// z for the reported two-sided 95% Wilson interval.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

impl Estimate {
    /// Deterministic reducer over per-trial outcomes in trial order.
    pub fn from_outcomes(strategy: Strategy, config: &SessionConfig, m: usize, outcomes: &[AttackOutcome]) -> Self {
        let trials = outcomes.len() as u64;
        let successes = outcomes.iter().filter(|o| o.forged_accepted).count() as u64;
        let (wilson_low, wilson_high) = wilson_interval(successes, trials, WILSON_Z);
        Estimate {
            strategy,
            trials,
            successes,
            rate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
            wilson_low,
            wilson_high,
            analytic_bound: strategy.analytic_bound(config, m),
            boundary: strategy.is_boundary(config, m),
        }
    }
}

/// Sequential Monte Carlo over `trials` seeded sessions.
pub fn estimate_forgery_success(
    config: &SessionConfig,
    code: &CodeSpec,
    strategy: Strategy,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    let outcomes = (0..trials).map(|i| run_trial(config, code, strategy, seed, i)).collect::<Result<Vec<_>>>()?;
    Ok(Estimate::from_outcomes(strategy, config, code.m(), &outcomes))
}
