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

use std::path::Path;
use std::process::{Command, Output};

fn chronicle(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_chronicle"));
    cmd.args(args).env_remove("CHRONICLE_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name).to_string_lossy().into_owned()
}

#[test]
fn verify_suite_passes_by_default() {
    let out = chronicle(&["verify-paper"], &[]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(!text.contains("FAIL"));
    assert!(text.contains("18 checks, 0 failed"));
}

#[test]
fn tiny_tolerance_fails() {
    let out = chronicle(&["verify-paper", "--tol", "1e-30"], &[]);
    assert!(!out.status.success());
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
#[allow(clippy::approx_constant)]
fn single_check_at_given_angle() {
    let out = chronicle(&["verify-paper", "--only", "eq43", "--theta", "1.0472", "--output", "json"], &[]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 1);
    assert_eq!(checks[0]["name"], "eq43");
    assert_eq!(checks[0]["passed"], true);
    assert_eq!(report["theta"].as_f64(), Some(1.0472));
}

#[test]
fn unknown_check_is_a_usage_error() {
    let out = chronicle(&["verify-paper", "--only", "eq99"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eq43"));
}

#[test]
fn tolerance_from_environment_and_flag_precedence() {
    let out = chronicle(&["verify-paper", "--only", "eq24", "--output", "json"], &[("CHRONICLE_TOL", "1e-30")]);
    assert!(!out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["tolerance"].as_f64(), Some(1e-30));

    let out = chronicle(&["verify-paper", "--only", "eq24", "--tol", "1e-9"], &[("CHRONICLE_TOL", "1e-30")]);
    assert!(out.status.success());
}

#[test]
fn run_prints_canonical_json() {
    let path = scenario("eq40_theta_pi_3.json");
    let first = chronicle(&["run", &path], &[]);
    let second = chronicle(&["run", &path], &[]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let report: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    let p = report["queries"][0]["value"].as_f64().unwrap();
    assert!((p - 0.25).abs() < 1e-10);
}

#[test]
fn run_table_output() {
    let out = chronicle(&["run", "--output", "table", &scenario("eq23.json")], &[]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("family singlet-z: consistent"));
    assert!(text.contains("z_a+∧z_b-  z_a+∧z_b-  0.500000000000"));
}

#[test]
fn run_reports_errors_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\n  \"name\": 3\n}\n").unwrap();
    let out = chronicle(&["run", path.to_str().unwrap()], &[]);
    assert!(!out.status.success());
    assert!(out.stdout.is_empty());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");

    let out = chronicle(&["run", dir.path().join("missing.json").to_str().unwrap()], &[]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
}
