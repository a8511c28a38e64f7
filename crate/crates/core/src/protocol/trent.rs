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
};
use crate::error::{Error, Result};
use crate::qcrypto::{
    derive_x, masking_bits, otp_decrypt, otp_encrypt, C1Plain, C2Plain, Ciphertext, ClassicalKey, DerivedX,
    SyndromePlain,
};
use crate::rng::RandomStream;
use crate::stabilizer::Syndrome;
use crate::state::StateVector;

/// What Trent keeps for later disputes.
#[derive(Clone, Debug, PartialEq)]
pub struct TrentEvidence {
    pub signature: Vec<StateVector>,
    pub s_t: Syndrome,
    pub s_b: Option<Syndrome>,
    pub big_x: DerivedX,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum TrentState {
    Collecting,
    Verified,
    Challenged,
    Released,
    Aborted,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrentDecision {
    /// Carries `C₂` for Bob.
    Proceed {
        c2: ProtocolMessage,
        failed: usize,
        exact_failed: usize,
    },
    Abort {
        failed: usize,
        exact_failed: usize,
    },
}

/// The arbitrator. Holds `K_AT` and `K_TB`.
#[derive(Debug)]
pub struct Trent {
    config: SessionConfig,
    k_at: ClassicalKey,
    k_tb: ClassicalKey,
    rng: RandomStream,
    state: TrentState,
    c1: Option<Ciphertext>,
    copies: Option<Vec<Vec<StateVector>>>,
    evidence: Option<TrentEvidence>,
}

impl Trent {
    pub fn new(config: SessionConfig, k_at: ClassicalKey, k_tb: ClassicalKey, rng: RandomStream) -> Self {
        Trent { config, k_at, k_tb, rng, state: TrentState::Collecting, c1: None, copies: None, evidence: None }
    }

    pub fn evidence(&self) -> Option<&TrentEvidence> {
        self.evidence.as_ref()
    }

    pub fn k_tb(&self) -> &ClassicalKey {
        &self.k_tb
    }

    /// Accepts `C₁` and Alice's two signature copies, in either order.
    pub fn receive(&mut self, msg: &ProtocolMessage) -> Result<()> {
        if self.state != TrentState::Collecting {
            return Err(Error::OutOfOrder("Trent is no longer collecting Alice's messages"));
        }
        let seq = self.config.seq_num;
        match msg.kind {
            MessageKind::C1 if self.c1.is_none() => {
                msg.check(seq, MessageKind::C1, Party::Alice, Party::Trent)?;
                self.c1 = Some(msg.ciphertext()?.clone());
            }
            MessageKind::SignatureCopies if self.copies.is_none() => {
                msg.check(seq, MessageKind::SignatureCopies, Party::Alice, Party::Trent)?;
                match &msg.payload {
                    Payload::Signatures(c) if c.len() == 2 => self.copies = Some(c.clone()),
                    _ => return Err(Error::Malformed("Trent expects exactly two signature copies".into())),
                }
            }
            _ => return Err(Error::Malformed(alloc::format!("unexpected {:?} at Trent", msg.kind))),
        }
        Ok(())
    }

    /// Checks the two copies against each other and against the signature
    /// recomputed from `C₁` and the registry.
    pub fn verify(&mut self, registry: &PublicRegistry) -> Result<TrentDecision> {
        if self.state != TrentState::Collecting {
            return Err(Error::OutOfOrder("Trent verifies once"));
        }
        let (Some(c1), Some(copies)) = (self.c1.take(), self.copies.take()) else {
            return Err(Error::OutOfOrder("Trent needs C1 and the signature copies"));
        };
        // Any failure below is final for this session.
        self.state = TrentState::Aborted;
        let plain = C1Plain::from_bits(&otp_decrypt(&mut self.k_at, &c1)?)?;
        let n = self.config.n_msg;
        if plain.seq_num != self.config.seq_num {
            return Err(Error::Malformed(alloc::format!("C1 names session {}", plain.seq_num)));
        }
        if plain.s.len() != self.config.syndrome_len() || plain.x.n_msg() != n {
            return Err(Error::Malformed("C1 field lengths do not match the session".into()));
        }
        super::family_key(&plain.k_fam)?;
        let big_x = derive_x(&plain.x, &masking_bits(&plain.s, n))?;
        let reference = registry.signature_for(&big_x)?;
        let BlockComparison { failed, exact_failed } =
            compare_blocks(&copies[0], &copies[1], &reference, self.config.comparison, &mut self.rng)?;
        if failed > self.config.max_failures() {
            return Ok(TrentDecision::Abort { failed, exact_failed });
        }
        let c2 = C2Plain { k_fam: plain.k_fam, x: plain.x };
        let c2 = otp_encrypt(&mut self.k_tb, &c2.to_bits()?)?;
        let mut copies = copies;
        self.evidence = Some(TrentEvidence { signature: copies.swap_remove(0), s_t: plain.s, s_b: None, big_x });
        self.state = TrentState::Verified;
        let c2 = ProtocolMessage::new(
            self.config.seq_num,
            Party::Trent,
            Party::Bob,
            MessageKind::C2,
            Payload::Classical(c2),
        );
        Ok(TrentDecision::Proceed { c2, failed, exact_failed })
    }

    /// Records Bob's syndrome from `C₃`.
    pub fn receive_c3(&mut self, msg: &ProtocolMessage) -> Result<()> {
        if self.state != TrentState::Verified {
            return Err(Error::OutOfOrder("C3 before Trent verified the signature"));
        }
        msg.check(self.config.seq_num, MessageKind::C3, Party::Bob, Party::Trent)?;
        let SyndromePlain(s_b) = SyndromePlain::from_bits(&otp_decrypt(&mut self.k_tb, msg.ciphertext()?)?)?;
        if let Some(e) = self.evidence.as_mut() {
            e.s_b = Some(s_b);
        }
        self.state = TrentState::Challenged;
        Ok(())
    }

    /// `C₄`: Trent's copy of the syndrome, under fresh `K_TB` bits.
    pub fn release(&mut self) -> Result<ProtocolMessage> {
        if self.state != TrentState::Challenged {
            return Err(Error::OutOfOrder("Trent releases C4 only after C3"));
        }
        let s_t = self.evidence.as_ref().map(|e| e.s_t.clone()).ok_or(Error::OutOfOrder("no evidence retained"))?;
        let c4 = otp_encrypt(&mut self.k_tb, &SyndromePlain(s_t).to_bits()?)?;
        self.state = TrentState::Released;
        Ok(ProtocolMessage::new(self.config.seq_num, Party::Trent, Party::Bob, MessageKind::C4, Payload::Classical(c4)))
    }
}
