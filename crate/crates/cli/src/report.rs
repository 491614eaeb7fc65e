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

//! Running scenarios and rendering the resulting reports.

use std::path::Path;

use chronicle_core::{check_consistency, probabilities, Event, Keep, ProbabilityTable};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scenario::{compile, ClauseDoc, QueryDoc, Scenario, ScenarioDocument};

pub const ENGINE_NAME: &str = "chronicle";
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineInfo {
    pub name: String,
    pub version: String,
}

impl EngineInfo {
    pub fn current() -> Self {
        EngineInfo { name: ENGINE_NAME.into(), version: ENGINE_VERSION.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyDoc {
    pub consistent: bool,
    pub worst_overlap: f64,
    pub worst_pair: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub labels: Vec<String>,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDoc {
    pub columns: Vec<String>,
    pub rows: Vec<HistoryRow>,
    pub total: f64,
}

impl TableDoc {
    fn from_table(table: &ProbabilityTable) -> Self {
        TableDoc {
            columns: table.columns().to_vec(),
            rows: table
                .entries()
                .iter()
                .map(|(index, p)| HistoryRow { labels: index.labels().to_vec(), probability: *p })
                .collect(),
            total: table.total(),
        }
    }

    pub fn get(&self, labels: &[&str]) -> Option<f64> {
        self.rows.iter().find(|r| r.labels.iter().map(String::as_str).eq(labels.iter().copied())).map(|r| r.probability)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub name: String,
    pub consistency: ConsistencyDoc,
    pub table: TableDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryReport {
    pub query: QueryDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<TableDoc>,
}

/// Everything `run` produces for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub engine: EngineInfo,
    pub tolerance: f64,
    pub scenario: ScenarioDocument,
    pub families: Vec<FamilyReport>,
    pub queries: Vec<QueryReport>,
}

impl ReportDocument {
    pub fn family(&self, name: &str) -> Option<&FamilyReport> {
        self.families.iter().find(|f| f.name == name)
    }
}

/// Loads, validates and evaluates the scenario at `path`.
pub fn run(path: &Path, tol: f64) -> Result<ReportDocument> {
    let doc = ScenarioDocument::load(path)?;
    evaluate(&compile(doc, tol)?, tol)
}

fn event(clauses: &[ClauseDoc]) -> Result<Event> {
    let mut event = Event::new();
    for c in clauses {
        let alternatives = c.alternatives()?;
        let refs: Vec<&str> = alternatives.iter().map(String::as_str).collect();
        event = event.and_any(c.time, &refs);
    }
    Ok(event)
}

pub fn evaluate(scenario: &Scenario, tol: f64) -> Result<ReportDocument> {
    let mut families = Vec::with_capacity(scenario.families.len());
    let mut tables = Vec::with_capacity(scenario.families.len());
    for (name, family) in &scenario.families {
        let report = check_consistency(family, tol);
        let table = probabilities(family, tol)?;
        families.push(FamilyReport {
            name: name.clone(),
            consistency: ConsistencyDoc {
                consistent: report.consistent,
                worst_overlap: report.worst_overlap,
                worst_pair: report.worst_pair.map(|(a, b)| vec![a.0, b.0]),
            },
            table: TableDoc::from_table(&table),
        });
        tables.push((name.as_str(), table));
    }
    let mut queries = Vec::with_capacity(scenario.document.queries.len());
    for q in &scenario.document.queries {
        let table = tables
            .iter()
            .find(|(n, _)| *n == q.family())
            .map(|(_, t)| t)
            .expect("query families are resolved at compile time");
        let (value, table) = match q {
            QueryDoc::Marginal { keep, .. } => {
                let keep: Vec<Keep> = keep.iter().map(|k| Keep { time: k.time, among: k.among.clone() }).collect();
                (None, Some(TableDoc::from_table(&table.marginal(&keep)?)))
            }
            QueryDoc::Conditional { given, target, .. } => {
                (Some(table.conditional(&event(given)?, &event(target)?, tol)?), None)
            }
            QueryDoc::Probability { event: clauses, .. } => (Some(table.probability(&event(clauses)?)?), None),
        };
        queries.push(QueryReport { query: q.clone(), value, table });
    }
    Ok(ReportDocument {
        engine: EngineInfo::current(),
        tolerance: tol,
        scenario: scenario.document.clone(),
        families,
        queries,
    })
}

/// Left-aligned columns separated by two spaces.
pub fn render_columns(headers: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in std::iter::once(headers).chain(rows.iter().map(Vec::as_slice)) {
        let mut line = String::new();
        for (i, (cell, w)) in row.iter().zip(&widths).enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(cell);
            line.extend(std::iter::repeat_n(' ', w - cell.chars().count()));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn render_table(table: &TableDoc) -> String {
    let mut headers = table.columns.clone();
    headers.push("Pr".into());
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| r.labels.iter().cloned().chain([format!("{:.12}", r.probability)]).collect())
        .collect();
    let mut out = render_columns(&headers, &rows);
    out.push_str(&format!("total {:.12}\n", table.total));
    out
}

fn describe_clauses(clauses: &[ClauseDoc]) -> String {
    clauses
        .iter()
        .map(|c| match (&c.label, &c.any) {
            (Some(l), _) => format!("{l}@t{}", c.time),
            (None, Some(any)) => format!("{{{}}}@t{}", any.join("|"), c.time),
            (None, None) => format!("?@t{}", c.time),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// Human-readable rendering of a report.
pub fn render_report(report: &ReportDocument) -> String {
    let mut out = format!(
        "scenario {} ({} {}, tolerance {:e})\n",
        report.scenario.name, report.engine.name, report.engine.version, report.tolerance
    );
    for f in &report.families {
        out.push_str(&format!(
            "\nfamily {}: {} (worst overlap {:e})\n",
            f.name,
            if f.consistency.consistent { "consistent" } else { "inconsistent" },
            f.consistency.worst_overlap
        ));
        out.push_str(&render_table(&f.table));
    }
    for (i, q) in report.queries.iter().enumerate() {
        let title = match &q.query {
            QueryDoc::Marginal { family, .. } => format!("marginal of {family}"),
            QueryDoc::Conditional { family, given, target } => {
                format!("Pr({} | {}) in {family}", describe_clauses(target), describe_clauses(given))
            }
            QueryDoc::Probability { family, event } => format!("Pr({}) in {family}", describe_clauses(event)),
        };
        out.push_str(&format!("\nquery {}: {title}", i + 1));
        match (&q.value, &q.table) {
            (Some(v), _) => out.push_str(&format!(" = {v:.12}\n")),
            (None, Some(t)) => {
                out.push('\n');
                out.push_str(&render_table(t));
            }
            (None, None) => out.push('\n'),
        }
    }
    out
}
