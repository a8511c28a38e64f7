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

//! Simulation core for an arbitrated quantum signature scheme.
//!
//! Three parties take part: a signer (Alice), a receiver (Bob) and an
//! arbitrator (Trent). Alice publishes quantum fingerprints of random secret
//! strings as her public key, pads her message with a quantum one-time pad,
//! hides it inside a keyed stabilizer code with a secret syndrome offset, and
//! signs a string derived from the pad key with fingerprint states. Trent and
//! Bob verify the signature with swap tests and compare syndromes over
//! one-time-pad protected classical channels.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches files,
//! threads or the command line lives in the companion `qsig` crate.
//!
//! Layout:
//!
//! * [`state`], [`pauli`], [`swap`], [`density`]: dense statevector simulation.
//! * [`fingerprint`]: classical codes with verified agreement bound and the
//!   fingerprint one-way function.
//! * [`stabilizer`]: the keyed `[[5,1,3]]` code family.
//! * [`qcrypto`]: quantum and classical one-time pads, the signed-string
//!   derivation and the classical message layouts.
//! * [`protocol`]: the three parties and the session engine.
//! * [`adversary`]: channel taps, the Holevo-budget leak model, attack
//!   strategies and Monte Carlo estimation.
//!
//! Qubit ordering is fixed crate-wide: qubit 0 is the leftmost tensor factor
//! and basis indices are big-endian in qubit order.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod adversary;
pub mod bits;
pub mod density;
pub mod error;
pub mod fingerprint;
pub mod pauli;
pub mod protocol;
pub mod qcrypto;
pub mod rng;
pub mod stabilizer;
pub mod state;
pub mod stats;
pub mod swap;

pub use bits::Bits;
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use pauli::{PauliString, Phase};
pub use rng::RandomStream;
pub use state::StateVector;

/// Absolute per-amplitude tolerance for every equality check on states.
pub const AMPLITUDE_TOLERANCE: f64 = 1e-10;
