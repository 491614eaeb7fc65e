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

//! Scenario runner and regression driver for `chronicle-core`.
//!
//! Scenarios are JSON documents describing tensor-product spaces, an initial
//! state, per-interval dynamics and one or more history families. Running a
//! scenario produces a [`ReportDocument`] with consistency results,
//! probability tables and answers to the queries in the document.

pub mod error;
pub mod json;
pub mod report;
pub mod scenario;
pub mod verify;

pub use error::{CliError, Result};
pub use json::to_canonical_json;
pub use report::{evaluate, render_report, run, ReportDocument};
pub use scenario::{compile, Scenario, ScenarioDocument};
pub use verify::{render_verify, verify, VerifyOptions, VerifyReport};
