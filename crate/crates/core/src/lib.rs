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

//! Consistent-histories quantum mechanics for finite-dimensional spaces.
//!
//! The crate builds frameworks (projective decompositions of the identity),
//! assembles them into history families over a time grid, checks the
//! consistency condition on chain kets and assigns probabilities. On top of
//! that sit idealized measurement models and a set of prebuilt two-spin
//! families around the singlet state.

pub mod epr;
pub mod error;
pub mod framework;
pub mod histories;
pub mod linalg;
pub mod measurement;
pub mod random;

pub use error::{Error, Result};
pub use framework::{Decomposition, Projector};
pub use histories::{
    check_consistency, probabilities, ConsistencyReport, Dynamics, Event, HistoryFamily, HistoryIndex, Keep,
    ProbabilityTable, TimeGrid,
};
pub use linalg::{Complex, Ket, Operator, TensorSpace, DEFAULT_TOL};
