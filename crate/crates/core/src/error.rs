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

use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{requested} qubits exceeds the simulator limit of {limit}")]
    TooManyQubits { requested: usize, limit: usize },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("amplitude count {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("Pauli operator with phase {0} is not Hermitian")]
    NonHermitian(crate::pauli::Phase),

    #[error("no code found for w={w}, c_rate={c_rate}, target_delta={target_delta} after {attempts} attempts")]
    CodeSearchFailed { w: usize, c_rate: usize, target_delta: f64, attempts: usize },

    #[error("invalid code parameters: {0}")]
    InvalidCode(String),

    #[error("one-time key exhausted: needed {needed} bits, {remaining} remain")]
    KeyExhausted { needed: usize, remaining: usize },

    #[error("syndrome prefix of {syndrome} bits exceeds pad key length {key}")]
    SyndromeTooLong { syndrome: usize, key: usize },

    #[error("decode failed: generator {generator} has residual eigenvalue -1")]
    DecodeFailure { generator: usize },

    #[error("malformed message: {0}")]
    Malformed(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("operation out of order: {0}")]
    OutOfOrder(&'static str),
}
