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

use std::path::PathBuf;
use std::process::ExitCode;

use chronicle::verify::check_names;
use chronicle::{render_report, render_verify, run, to_canonical_json, verify, VerifyOptions};
use chronicle_core::DEFAULT_TOL;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "chronicle", version, about = "Consistent-histories scenario runner")]
struct Cli {
    /// Numerical tolerance for consistency and comparisons.
    #[arg(long, global = true, env = "CHRONICLE_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario document and print its report.
    Run {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        output: Output,
    },
    /// Run the built-in regression suite.
    VerifyPaper {
        /// Run a single named check.
        #[arg(long)]
        only: Option<String>,
        /// Angle in radians for the angle-dependent checks.
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        #[arg(long, value_enum, default_value = "table")]
        output: Output,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        eprintln!("error: tolerance must be positive and finite, got {}", cli.tol);
        return ExitCode::from(2);
    }
    match cli.command {
        Command::Run { file, output } => {
            let report = match run(&file, cli.tol) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::FAILURE;
                }
            };
            match output {
                Output::Table => print!("{}", render_report(&report)),
                Output::Json => match to_canonical_json(&report) {
                    Ok(text) => print!("{text}"),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::FAILURE;
                    }
                },
            }
            ExitCode::SUCCESS
        }
        Command::VerifyPaper { only, theta, output } => {
            let options = VerifyOptions { only, theta, tol: cli.tol };
            let Some(report) = verify(&options) else {
                eprintln!(
                    "error: unknown check {:?}; available: {}",
                    options.only.unwrap_or_default(),
                    check_names().join(", ")
                );
                return ExitCode::from(2);
            };
            match output {
                Output::Table => print!("{}", render_verify(&report)),
                Output::Json => match to_canonical_json(&report) {
                    Ok(text) => print!("{text}"),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::FAILURE;
                    }
                },
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
