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

use super::{MessageKind, Party, Payload, ProtocolMessage, PublicRegistry, SessionConfig};
use crate::error::{Error, Result};
use crate::fingerprint::{CodeSpec, KeyPairSet};
use crate::qcrypto::{derive_x, masking_bits, otp_encrypt, qotp_encrypt, C1Plain, ClassicalKey, DerivedX, QotpKey};
use crate::rng::RandomStream;
use crate::stabilizer::{derive_code, BlockCode, CodeFamilyKey, Syndrome};
use crate::state::StateVector;

/// What Alice chose while signing. Never leaves her except through `C₁`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigningSecrets {
    pub x: QotpKey,
    pub k_fam: CodeFamilyKey,
    pub s: Syndrome,
    pub big_x: DerivedX,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum AliceState {
    Ready,
    Signed,
}

/// The signer. Holds her key pairs and her copies of `K_AT` and `K_AB`.
#[derive(Debug)]
pub struct Alice {
    config: SessionConfig,
    code: CodeSpec,
    keys: KeyPairSet,
    k_at: ClassicalKey,
    k_ab: ClassicalKey,
    rng: RandomStream,
    state: AliceState,
    secrets: Option<SigningSecrets>,
}

/// Alice's outgoing messages, split by recipient.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedMessages {
    pub to_bob: Vec<ProtocolMessage>,
    pub to_trent: Vec<ProtocolMessage>,
}

impl Alice {
    pub fn new(
        config: SessionConfig,
        code: CodeSpec,
        keys: KeyPairSet,
        k_at: ClassicalKey,
        k_ab: ClassicalKey,
        rng: RandomStream,
    ) -> Self {
        Alice { config, code, keys, k_at, k_ab, rng, state: AliceState::Ready, secrets: None }
    }

    pub fn secrets(&self) -> Option<&SigningSecrets> {
        self.secrets.as_ref()
    }

    /// `K_AB` is established but no protocol step consumes it.
    pub fn k_ab(&self) -> &ClassicalKey {
        &self.k_ab
    }

    /// Encrypts, encodes and signs `message`; one message per session.
    pub fn sign(&mut self, message: &StateVector, registry: &PublicRegistry) -> Result<SignedMessages> {
        if self.state != AliceState::Ready {
            return Err(Error::OutOfOrder("Alice signs once per session"));
        }
        let n = self.config.n_msg;
        if message.num_qubits() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: message.num_qubits() });
        }
        let x = QotpKey::random(n, &mut self.rng);
        let k_fam = CodeFamilyKey::random(&mut self.rng);
        let s = Syndrome::new(self.rng.bits(self.config.syndrome_len()));

        let rho = qotp_encrypt(message, &x)?;
        let blocks = BlockCode::new(derive_code(&k_fam)?, n)?;
        let pi = blocks.apply_syndrome_offset(&blocks.encode(&rho)?, &s)?;
        let big_x = derive_x(&x, &masking_bits(&s, n))?;
        // The signature is built from the secret halves, not the registry.
        let sigma: Vec<StateVector> = (0..self.config.positions())
            .map(|i| self.code.fingerprint_with_form(self.keys.secret().get(i, big_x.get(i)), self.keys.form()))
            .collect::<Result<_>>()?;
        debug_assert_eq!(registry.signature_for(&big_x).ok().as_ref(), Some(&sigma));

        let c1 = C1Plain { seq_num: self.config.seq_num, s: s.clone(), k_fam: k_fam.bits().clone(), x: x.clone() };
        let c1 = otp_encrypt(&mut self.k_at, &c1.to_bits()?)?;

        let seq = self.config.seq_num;
        let msg = |to, kind, payload| ProtocolMessage::new(seq, Party::Alice, to, kind, payload);
        let copies = alloc::vec![sigma.clone(), sigma];
        let to_bob = alloc::vec![
            msg(Party::Bob, MessageKind::QuantumPayload, Payload::Quantum(pi)),
            msg(Party::Bob, MessageKind::SignatureCopies, Payload::Signatures(copies.clone())),
        ];
        let to_trent = alloc::vec![
            msg(Party::Trent, MessageKind::C1, Payload::Classical(c1)),
            msg(Party::Trent, MessageKind::SignatureCopies, Payload::Signatures(copies)),
        ];
        self.secrets = Some(SigningSecrets { x, k_fam, s, big_x });
        self.state = AliceState::Signed;
        Ok(SignedMessages { to_bob, to_trent })
    }
}
