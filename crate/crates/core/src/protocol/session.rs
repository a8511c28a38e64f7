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

//! Key setup and the session engine.

use alloc::format;
use alloc::vec::Vec;

use super::{
    Alice, Bob, BobClaim, Party, ProtocolMessage, PublicRegistry, SessionConfig, SessionTranscript, SigningSecrets,
    Trent, TrentEvidence, Verdict, VerdictReason,
};
use crate::error::{Error, Result};
use crate::fingerprint::{build_code, generate_keypairs_with_form, CodeSpec, KeyPairSet, SecretKeys};
use crate::qcrypto::{C1Plain, C2Plain, ClassicalKey, SyndromePlain};
use crate::rng::RandomStream;
use crate::state::StateVector;

use super::trent::TrentDecision;

/// Observes and may rewrite every message in flight.
pub trait ChannelTap {
    fn intercept(&mut self, msg: ProtocolMessage, _rng: &mut RandomStream) -> ProtocolMessage {
        msg
    }

    /// Debug backdoor: only called by [`run_session_with_backdoor`], for
    /// control experiments that hand the tap Alice's secrets.
    fn reveal_secrets(&mut self, _secrets: &SigningSecrets) {}
}

/// Forwards everything untouched.
#[derive(Copy, Clone, Debug, Default)]
pub struct NoTap;

impl ChannelTap for NoTap {}

/// Everything established before Alice signs.
#[derive(Clone, Debug)]
pub struct SessionSetup {
    config: SessionConfig,
    code: CodeSpec,
    keypairs: KeyPairSet,
    registry: PublicRegistry,
    k_at: ClassicalKey,
    k_tb: ClassicalKey,
    k_ab: ClassicalKey,
}

/// Bits needed for `(K_AT, K_TB, K_AB)`.
pub fn key_sizes(config: &SessionConfig) -> (usize, usize, usize) {
    let (n, k) = (config.n_msg, config.k_fam_bits());
    let r = config.key_reserve;
    (C1Plain::encoded_len(n, k) + r, C2Plain::encoded_len(n, k) + 2 * SyndromePlain::encoded_len(n) + r, r)
}

impl SessionSetup {
    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn code(&self) -> &CodeSpec {
        &self.code
    }

    pub fn registry(&self) -> &PublicRegistry {
        &self.registry
    }

    /// Alice's private halves. Only the Holevo oracle and tests look here.
    pub fn secret_keys(&self) -> &SecretKeys {
        self.keypairs.secret()
    }

    pub fn k_at(&self) -> &ClassicalKey {
        &self.k_at
    }

    pub fn k_tb(&self) -> &ClassicalKey {
        &self.k_tb
    }

    pub fn k_ab(&self) -> &ClassicalKey {
        &self.k_ab
    }

    /// A fresh message to sign, from the session's own stream.
    pub fn random_message(&self) -> Result<StateVector> {
        StateVector::random(self.config.n_msg, &mut RandomStream::new(self.config.master_seed).derive("message"))
    }
}

/// Builds the fingerprint code from the master seed, then sets up keys.
pub fn setup_keys(config: &SessionConfig) -> Result<SessionSetup> {
    config.validate()?;
    let mut rng = RandomStream::new(config.master_seed).derive("code");
    let code = build_code(config.w, config.c_rate, config.target_delta, &mut rng)?;
    setup_keys_with_code(config, code)
}

/// Key setup over a prebuilt code, so Monte Carlo runs need not rebuild it.
pub fn setup_keys_with_code(config: &SessionConfig, code: CodeSpec) -> Result<SessionSetup> {
    config.validate()?;
    if code.w() != config.w || code.c_rate() != config.c_rate {
        return Err(Error::InvalidConfig(format!(
            "code is w={} c_rate={}, session wants w={} c_rate={}",
            code.w(),
            code.c_rate(),
            config.w,
            config.c_rate
        )));
    }
    let root = RandomStream::new(config.master_seed);
    let keypairs = generate_keypairs_with_form(
        config.n_msg,
        &code,
        config.fingerprint_form,
        config.key_sampling,
        &mut root.derive("keypairs"),
    )?;
    let registry = PublicRegistry::new(keypairs.public().clone());
    let (at, tb, ab) = key_sizes(config);
    Ok(SessionSetup {
        config: config.clone(),
        code,
        keypairs,
        registry,
        k_at: ClassicalKey::random(at, &mut root.derive("k_at")),
        k_tb: ClassicalKey::random(tb, &mut root.derive("k_tb")),
        k_ab: ClassicalKey::random(ab, &mut root.derive("k_ab")),
    })
}

#[derive(Clone, Debug)]
pub struct SessionOutcome {
    pub transcript: SessionTranscript,
    pub verdict: Verdict,
    pub trent_evidence: Option<TrentEvidence>,
    pub bob_claim: Option<BobClaim>,
    /// Alice's choices, for test oracles. No party or tap reads this.
    pub secrets: Option<SigningSecrets>,
    /// Whether `K_AB` was left untouched, as the protocol never uses it.
    pub k_ab_unused: bool,
}

struct Engine<'a> {
    tap: &'a mut dyn ChannelTap,
    tap_rng: RandomStream,
    transcript: SessionTranscript,
}

impl Engine<'_> {
    fn deliver(&mut self, msg: ProtocolMessage) -> ProtocolMessage {
        let msg = self.tap.intercept(msg, &mut self.tap_rng);
        self.transcript.push_message(msg.clone());
        msg
    }
}

/// Runs one session. Party-level failures end in a rejecting verdict;
/// only setup problems surface as errors.
pub fn run_session(setup: SessionSetup, message: &StateVector, tap: &mut dyn ChannelTap) -> Result<SessionOutcome> {
    run(setup, message, tap, false)
}

/// As [`run_session`], but first hands Alice's secrets to the tap.
pub fn run_session_with_backdoor(
    setup: SessionSetup,
    message: &StateVector,
    tap: &mut dyn ChannelTap,
) -> Result<SessionOutcome> {
    run(setup, message, tap, true)
}

/// Honest parties, no tap, message drawn from the master seed.
pub fn run_honest_session(config: &SessionConfig) -> Result<SessionOutcome> {
    let setup = setup_keys(config)?;
    let message = setup.random_message()?;
    run_session(setup, &message, &mut NoTap)
}

fn run(setup: SessionSetup, message: &StateVector, tap: &mut dyn ChannelTap, backdoor: bool) -> Result<SessionOutcome> {
    let SessionSetup { config, code, keypairs, registry, k_at, k_tb, k_ab } = setup;
    let root = RandomStream::new(config.master_seed);
    let mut alice = Alice::new(config.clone(), code, keypairs, k_at.clone(), k_ab, root.derive("alice"));
    let mut trent = Trent::new(config.clone(), k_at, k_tb.clone(), root.derive("trent"));
    let mut bob = Bob::new(config.clone(), k_tb, root.derive("bob"));
    let mut engine = Engine { tap, tap_rng: root.derive("tap"), transcript: SessionTranscript::new() };

    let signed = alice.sign(message, &registry)?;
    engine.transcript.log(Party::Alice, "signed");
    if backdoor {
        if let Some(s) = alice.secrets() {
            engine.tap.reveal_secrets(s);
        }
    }
    let verdict = match exchange(&mut engine, signed, &mut trent, &mut bob, &registry) {
        Ok(v) => v,
        Err(e) => {
            engine.transcript.log(Party::Bob, format!("aborted: {e}"));
            Verdict::rejected(VerdictReason::from_error(&e))
        }
    };
    engine.transcript.log(Party::Bob, format!("verdict {:?}", verdict.reason));
    Ok(SessionOutcome {
        transcript: engine.transcript,
        k_ab_unused: alice.k_ab().consumed() == 0,
        secrets: alice.secrets().cloned(),
        trent_evidence: trent.evidence().cloned(),
        bob_claim: bob.claim(),
        verdict,
    })
}

fn exchange(
    engine: &mut Engine<'_>,
    signed: super::alice::SignedMessages,
    trent: &mut Trent,
    bob: &mut Bob,
    registry: &PublicRegistry,
) -> Result<Verdict> {
    let to_bob: Vec<ProtocolMessage> = signed.to_bob.into_iter().map(|m| engine.deliver(m)).collect();
    for m in signed.to_trent {
        let m = engine.deliver(m);
        trent.receive(&m)?;
    }
    let c2 = match trent.verify(registry)? {
        TrentDecision::Abort { failed, exact_failed } => {
            engine.transcript.log(Party::Trent, format!("abort: {failed} failed blocks"));
            return Ok(Verdict {
                accepted: false,
                e_count: failed,
                exact_failures: exact_failed,
                reason: VerdictReason::TrentRejectedSignature,
                recovered_state: None,
            });
        }
        TrentDecision::Proceed { c2, failed, .. } => {
            engine.transcript.log(Party::Trent, format!("proceed: {failed} failed blocks"));
            c2
        }
    };
    for m in &to_bob {
        bob.receive(m)?;
    }
    bob.receive(&engine.deliver(c2))?;
    let c3 = engine.deliver(bob.challenge()?);
    engine.transcript.log(Party::Bob, "measured syndrome");
    trent.receive_c3(&c3)?;
    let c4 = engine.deliver(trent.release()?);
    engine.transcript.log(Party::Trent, "released syndrome");
    bob.finalize(&c4, registry)
}
