// Copyright 2026 The Chronicle Authors
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

use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("invalid dimension {0}")]
    InvalidDim(usize),
    #[error("unknown tensor factor '{0}'")]
    UnknownFactor(String),
    #[error("duplicate label '{0}'")]
    DuplicateLabel(String),
    #[error("operator '{0}' is not a projector")]
    NotProjector(String),
    #[error("invalid decomposition: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidDecomposition(Vec<DecompositionViolation>),
    #[error("frameworks are incompatible: '{0}' and '{1}' do not commute")]
    IncompatibleFrameworks(String, String),
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("operator for interval {0} is not unitary")]
    NotUnitary(usize),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("label '{label}' not found at time {time}")]
    LabelNotFound { time: usize, label: String },
    #[error("inconsistent family: histories {first:?} and {second:?} overlap by {overlap:e}")]
    InconsistentFamily { first: Vec<String>, second: Vec<String>, overlap: f64 },
    #[error("conditioning event has probability {0:e}")]
    ConditionOnNullEvent(f64),
    #[error("projection of the state is null (norm {0:e})")]
    NullProjection(f64),
    #[error("measurement spec is inconsistent: {0}")]
    SpecInconsistent(String),
    #[error("orthonormal completion failed: found {found} of {expected} vectors")]
    CompletionFailure { expected: usize, found: usize },
    #[error("families do not share a grid: {0}")]
    GridMismatch(String),
    #[error("invalid direction (theta {theta}, phi {phi})")]
    InvalidDirection { theta: f64, phi: f64 },
    #[error("invalid event: {0}")]
    InvalidEvent(String),
}

/// A single failed condition found while validating a decomposition.
#[derive(Debug, Clone, PartialEq)]
pub enum DecompositionViolation {
    NotProjector(String),
    SumNotIdentity { deviation: f64 },
    NotMutuallyOrthogonal { first: String, second: String, deviation: f64 },
    DuplicateLabel(String),
    DimMismatch { label: String, dim: usize },
}

impl std::fmt::Display for DecompositionViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NotProjector(l) => write!(f, "'{l}' is not a projector"),
            Self::SumNotIdentity { deviation } => {
                write!(f, "members do not sum to the identity (deviation {deviation:e})")
            }
            Self::NotMutuallyOrthogonal { first, second, deviation } => {
                write!(f, "'{first}' and '{second}' are not orthogonal (deviation {deviation:e})")
            }
            Self::DuplicateLabel(l) => write!(f, "duplicate label '{l}'"),
            Self::DimMismatch { label, dim } => write!(f, "'{label}' has dimension {dim}"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
