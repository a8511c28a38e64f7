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

use alloc::vec::Vec;

use super::{
    compare_blocks, BlockComparison, MessageKind, Party, Payload, ProtocolMessage, PublicRegistry, SessionConfig,
    Verdict, VerdictReason,
};
use crate::error::{Error, Result};
use crate::qcrypto::{
    derive_x, masking_bits, otp_decrypt, otp_encrypt, qotp_decrypt, C2Plain, Ciphertext, ClassicalKey, DerivedX,
    QotpKey, SyndromePlain,
};
use crate::rng::RandomStream;
use crate::stabilizer::{derive_code, BlockCode, Syndrome};
use crate::state::StateVector;

/// What Bob can show Trent in a dispute.
#[derive(Clone, Debug, PartialEq)]
pub struct BobClaim {
    pub signature: Vec<StateVector>,
    pub s_b: Syndrome,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum BobState {
    Collecting,
    Challenged,
    Finished,
}

#[derive(Debug)]
struct Held {
    rho: StateVector,
    x_b: QotpKey,
    big_x: DerivedX,
    s_b: Syndrome,
    copies: Vec<Vec<StateVector>>,
}

/// The receiver. Holds `K_TB`.
#[derive(Debug)]
pub struct Bob {
    config: SessionConfig,
    k_tb: ClassicalKey,
    rng: RandomStream,
    state: BobState,
    pi: Option<StateVector>,
    copies: Option<Vec<Vec<StateVector>>>,
    c2: Option<Ciphertext>,
    held: Option<Held>,
}

impl Bob {
    pub fn new(config: SessionConfig, k_tb: ClassicalKey, rng: RandomStream) -> Self {
        Bob { config, k_tb, rng, state: BobState::Collecting, pi: None, copies: None, c2: None, held: None }
    }

    /// Bob's signature copy and measured syndrome, once he has them.
    pub fn claim(&self) -> Option<BobClaim> {
        self.held.as_ref().map(|h| BobClaim { signature: h.copies[0].clone(), s_b: h.s_b.clone() })
    }

    /// Accepts `π` and the signature copies from Alice and `C₂` from Trent.
    pub fn receive(&mut self, msg: &ProtocolMessage) -> Result<()> {
        if self.state != BobState::Collecting {
            return Err(Error::OutOfOrder("Bob is no longer collecting"));
        }
        let seq = self.config.seq_num;
        match (msg.kind, &msg.payload) {
            (MessageKind::QuantumPayload, Payload::Quantum(pi)) if self.pi.is_none() => {
                msg.check(seq, MessageKind::QuantumPayload, Party::Alice, Party::Bob)?;
                self.pi = Some(pi.clone());
            }
            (MessageKind::SignatureCopies, Payload::Signatures(c)) if self.copies.is_none() && c.len() == 2 => {
                msg.check(seq, MessageKind::SignatureCopies, Party::Alice, Party::Bob)?;
                self.copies = Some(c.clone());
            }
            (MessageKind::C2, _) if self.c2.is_none() => {
                msg.check(seq, MessageKind::C2, Party::Trent, Party::Bob)?;
                self.c2 = Some(msg.ciphertext()?.clone());
            }
            _ => return Err(Error::Malformed(alloc::format!("unexpected {:?} at Bob", msg.kind))),
        }
        Ok(())
    }

    /// Measures the syndrome of `π′` under `Q_k`, decodes, and reports the
    /// syndrome to Trent as `C₃`.
    pub fn challenge(&mut self) -> Result<ProtocolMessage> {
        if self.state != BobState::Collecting {
            return Err(Error::OutOfOrder("Bob challenges once"));
        }
        let (Some(pi), Some(copies), Some(c2)) = (self.pi.take(), self.copies.take(), self.c2.take()) else {
            return Err(Error::OutOfOrder("Bob needs the payload, the signature copies and C2"));
        };
        self.state = BobState::Finished;
        let n = self.config.n_msg;
        let plain = C2Plain::from_bits(&otp_decrypt(&mut self.k_tb, &c2)?)?;
        if plain.x.n_msg() != n {
            return Err(Error::Malformed("C2 pad key length does not match the session".into()));
        }
        let blocks = BlockCode::new(derive_code(&super::family_key(&plain.k_fam)?)?, n)?;
        let (s_b, post) = blocks.measure_syndrome(&pi, &mut self.rng)?;
        let rho = blocks.decode(&post, &s_b)?;
        let big_x = derive_x(&plain.x, &masking_bits(&s_b, n))?;
        let c3 = otp_encrypt(&mut self.k_tb, &SyndromePlain(s_b.clone()).to_bits()?)?;
        self.held = Some(Held { rho, x_b: plain.x, big_x, s_b, copies });
        self.state = BobState::Challenged;
        Ok(ProtocolMessage::new(self.config.seq_num, Party::Bob, Party::Trent, MessageKind::C3, Payload::Classical(c3)))
    }

    /// Compares syndromes, checks the signature blockwise and, on success,
    /// removes the pad.
    pub fn finalize(&mut self, c4: &ProtocolMessage, registry: &PublicRegistry) -> Result<Verdict> {
        if self.state != BobState::Challenged {
            return Err(Error::OutOfOrder("C4 before Bob's challenge"));
        }
        self.state = BobState::Finished;
        c4.check(self.config.seq_num, MessageKind::C4, Party::Trent, Party::Bob)?;
        let SyndromePlain(s_t) = SyndromePlain::from_bits(&otp_decrypt(&mut self.k_tb, c4.ciphertext()?)?)?;
        let held = self.held.as_ref().ok_or(Error::OutOfOrder("nothing held"))?;
        if s_t != held.s_b {
            return Ok(Verdict::rejected(VerdictReason::SyndromeMismatch));
        }
        let reference = registry.signature_for(&held.big_x)?;
        let BlockComparison { failed, exact_failed } =
            compare_blocks(&held.copies[0], &held.copies[1], &reference, self.config.comparison, &mut self.rng)?;
        if failed > self.config.max_failures() {
            return Ok(Verdict {
                accepted: false,
                e_count: failed,
                exact_failures: exact_failed,
                reason: VerdictReason::SignatureMismatch,
                recovered_state: None,
            });
        }
        Ok(Verdict {
            accepted: true,
            e_count: failed,
            exact_failures: exact_failed,
            reason: VerdictReason::Accepted,
            recovered_state: Some(qotp_decrypt(&held.rho, &held.x_b)?),
        })
    }
}
