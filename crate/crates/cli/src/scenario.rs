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

//! Scenario documents and their compilation into history families.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;

use chronicle_core::epr::{singlet, spin_decomposition, spin_ket, spin_label, Direction, Sign};
use chronicle_core::histories::{EVOLVED_COMPLEMENT_LABEL, EVOLVED_LABEL};
use chronicle_core::measurement::{build_measurement_unitary, MeasurementSpec};
use chronicle_core::{
    Complex, Decomposition, Dynamics, HistoryFamily, Ket, Operator, Projector, TensorSpace, TimeGrid,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// A complex number written either as a bare real or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Amplitude {
    Real(f64),
    Complex([f64; 2]),
}

impl Amplitude {
    pub fn value(self) -> Complex {
        match self {
            Amplitude::Real(re) => Complex::new(re, 0.0),
            Amplitude::Complex([re, im]) => Complex::new(re, im),
        }
    }
}

/// An angle in radians, either numeric or a short expression such as
/// `"pi/3"`, `"2*pi/3"` or `"-pi/4"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Radians(f64),
    Expr(String),
}

impl Default for Angle {
    fn default() -> Self {
        Angle::Radians(0.0)
    }
}

impl Angle {
    pub fn radians(&self) -> Result<f64> {
        match self {
            Angle::Radians(v) => Ok(*v),
            Angle::Expr(text) => eval_angle(text).ok_or_else(|| CliError::invalid(format!("bad angle {text:?}"))),
        }
    }
}

fn eval_angle(text: &str) -> Option<f64> {
    let t = text.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Some(v);
    }
    let (sign, t) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, t),
    };
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().ok()?),
        None => (t, 1.0),
    };
    let factor = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some(k) => k.trim().trim_end_matches('*').trim().parse::<f64>().ok()?,
        None => return None,
    };
    if den == 0.0 {
        return None;
    }
    Some(sign * factor * PI / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub label: String,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionDoc {
    pub theta: Angle,
    #[serde(default)]
    pub phi: Angle,
}

impl DirectionDoc {
    fn direction(&self) -> Result<Direction> {
        Ok(Direction::new(self.theta.radians()?, self.phi.radians()?)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinStateDoc {
    pub theta: Angle,
    #[serde(default)]
    pub phi: Angle,
    pub sign: String,
}

/// A pure state: a named builder (`"singlet"`), an amplitude list, a basis
/// vector, a spin-half eigenstate or a product over factor groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateDoc {
    Named(String),
    Amplitudes(Vec<Amplitude>),
    Basis { basis: usize },
    Spin { spin: SpinStateDoc },
    Product { product: Vec<PartDoc> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartDoc {
    pub factors: Vec<String>,
    pub state: StateDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisDoc {
    Named(String),
    Spin { spin: DirectionDoc },
    Kets(Vec<Vec<Amplitude>>),
}

/// An idealized measurement of `system` recorded on `pointer`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementDoc {
    pub name: String,
    pub system: String,
    pub pointer: String,
    pub basis: BasisDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ready_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_states: Option<Vec<Vec<Amplitude>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<String>>,
    pub matrix: Vec<Vec<Amplitude>>,
}

/// The unitary for one interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepDoc {
    Named(String),
    Measure { measure: Vec<String> },
    Unitary { unitary: MatrixDoc },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectorDoc {
    pub label: String,
    pub matrix: Vec<Vec<Amplitude>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<String>>,
    pub projectors: Vec<ProjectorDoc>,
}

/// One decomposition: a builder string such as `"spin(a, 0, 0)"`,
/// `"basis(s)"`, `"pointer(Ma)"`, `"system(Ma)"`, `"evolved"`,
/// `"identity"`, or explicit projector matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RefDoc {
    Named(String),
    Explicit(ExplicitDoc),
}

/// A slot holds one decomposition or several to be refined together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SlotDoc {
    One(RefDoc),
    Many(Vec<RefDoc>),
}

impl SlotDoc {
    fn refs(&self) -> Vec<&RefDoc> {
        match self {
            SlotDoc::One(r) => vec![r],
            SlotDoc::Many(rs) => rs.iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    pub name: String,
    pub slots: Vec<SlotDoc>,
}

/// `time` is the 1-based slot index; the clause holds if the history has
/// `label` (or any of `any`) there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClauseDoc {
    pub time: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub any: Option<Vec<String>>,
}

impl ClauseDoc {
    pub fn alternatives(&self) -> Result<Vec<String>> {
        match (&self.label, &self.any) {
            (Some(l), None) => Ok(vec![l.clone()]),
            (None, Some(any)) if !any.is_empty() => Ok(any.clone()),
            _ => Err(CliError::invalid(format!(
                "clause at time {} needs exactly one of `label` or a nonempty `any`",
                self.time
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeepDoc {
    pub time: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub among: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QueryDoc {
    Marginal { family: String, keep: Vec<KeepDoc> },
    Conditional { family: String, given: Vec<ClauseDoc>, target: Vec<ClauseDoc> },
    Probability { family: String, event: Vec<ClauseDoc> },
}

impl QueryDoc {
    pub fn family(&self) -> &str {
        match self {
            QueryDoc::Marginal { family, .. }
            | QueryDoc::Conditional { family, .. }
            | QueryDoc::Probability { family, .. } => family,
        }
    }

    fn clauses(&self) -> Vec<&ClauseDoc> {
        match self {
            QueryDoc::Marginal { .. } => Vec::new(),
            QueryDoc::Conditional { given, target, .. } => given.iter().chain(target).collect(),
            QueryDoc::Probability { event, .. } => event.iter().collect(),
        }
    }

    fn times(&self) -> Vec<usize> {
        match self {
            QueryDoc::Marginal { keep, .. } => keep.iter().map(|k| k.time).collect(),
            _ => self.clauses().iter().map(|c| c.time).collect(),
        }
    }
}

/// Serialized description of spaces, dynamics, families and queries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub spaces: Vec<SpaceDoc>,
    pub initial: StateDoc,
    pub times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub measurements: Vec<MeasurementDoc>,
    pub dynamics: Vec<StepDoc>,
    pub families: Vec<FamilyDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub queries: Vec<QueryDoc>,
}

impl ScenarioDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(CliError::parse)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }
}

/// A validated scenario ready for evaluation.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub document: ScenarioDocument,
    pub space: TensorSpace,
    pub families: Vec<(String, HistoryFamily)>,
}

impl Scenario {
    pub fn family(&self, name: &str) -> Option<&HistoryFamily> {
        self.families.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }
}

fn context<T>(what: impl FnOnce() -> String, r: chronicle_core::Result<T>) -> Result<T> {
    r.map_err(|e| CliError::invalid(format!("{}: {e}", what())))
}

struct Measurement {
    spec: MeasurementSpec,
    system: String,
    pointer: String,
}

struct Builder<'a> {
    doc: &'a ScenarioDocument,
    space: TensorSpace,
    tol: f64,
    measurements: HashMap<String, Measurement>,
}

pub fn compile(doc: ScenarioDocument, tol: f64) -> Result<Scenario> {
    let space = context(|| "spaces".into(), TensorSpace::new(doc.spaces.iter().map(|s| (s.label.as_str(), s.dim))))?;
    let grid = context(|| "times".into(), TimeGrid::new(doc.times.clone()))?;
    let mut builder = Builder { doc: &doc, space, tol, measurements: HashMap::new() };
    for m in &doc.measurements {
        let built = builder.measurement(m)?;
        if builder.measurements.insert(m.name.clone(), built).is_some() {
            return Err(CliError::invalid(format!("measurement {:?} defined twice", m.name)));
        }
    }
    let dynamics = builder.dynamics(grid.intervals())?;
    let initial = builder.state(&doc.initial, &all_factors(&builder.space), "initial")?;
    if !initial.is_normalized(tol) {
        return Err(CliError::invalid(format!("initial state has norm {}", initial.norm())));
    }
    let mut families: Vec<(String, HistoryFamily)> = Vec::new();
    for f in &doc.families {
        if families.iter().any(|(n, _)| n == &f.name) {
            return Err(CliError::invalid(format!("family {:?} defined twice", f.name)));
        }
        if f.slots.len() != grid.intervals() {
            return Err(CliError::invalid(format!(
                "family {:?} has {} slots but the grid has {} times after t0",
                f.name,
                f.slots.len(),
                grid.intervals()
            )));
        }
        let mut slots = Vec::with_capacity(f.slots.len());
        for (j, slot) in f.slots.iter().enumerate() {
            let evolved = dynamics.propagator(0, j + 1).apply(&initial)?;
            slots.push(builder.slot(slot, &evolved, &f.name, j + 1)?);
        }
        let family = context(
            || format!("family {:?}", f.name),
            HistoryFamily::new(initial.clone(), grid.clone(), dynamics.clone(), slots, tol),
        )?;
        families.push((f.name.clone(), family));
    }
    for (i, q) in doc.queries.iter().enumerate() {
        let Some((_, family)) = families.iter().find(|(n, _)| n == q.family()) else {
            return Err(CliError::invalid(format!("query {i} refers to unknown family {:?}", q.family())));
        };
        for t in q.times() {
            if t == 0 || t > family.slots().len() {
                return Err(CliError::invalid(format!(
                    "query {i} refers to time {t} outside 1..={}",
                    family.slots().len()
                )));
            }
        }
        for c in q.clauses() {
            c.alternatives()?;
        }
    }
    let space = builder.space;
    Ok(Scenario { document: doc, space, families })
}

fn all_factors(space: &TensorSpace) -> Vec<String> {
    space.factors().iter().map(|(l, _)| l.clone()).collect()
}

fn ket_from(amplitudes: &[Amplitude], what: &str) -> Result<Ket> {
    context(|| what.to_string(), Ket::new(amplitudes.iter().map(|a| a.value()).collect()))
}

fn parse_sign(text: &str) -> Result<Sign> {
    match text {
        "+" => Ok(Sign::Plus),
        "-" => Ok(Sign::Minus),
        other => Err(CliError::invalid(format!("sign must be \"+\" or \"-\", got {other:?}"))),
    }
}

impl Builder<'_> {
    fn factor_dim(&self, label: &str) -> Result<usize> {
        self.space.factor_dim(label).map_err(|_| CliError::invalid(format!("unknown factor {label:?}")))
    }

    fn group_dim(&self, factors: &[String]) -> Result<usize> {
        factors.iter().try_fold(1, |acc, f| Ok(acc * self.factor_dim(f)?))
    }

    fn state(&self, doc: &StateDoc, factors: &[String], what: &str) -> Result<Ket> {
        let dim = self.group_dim(factors)?;
        let ket = match doc {
            StateDoc::Named(name) if name == "singlet" => singlet(),
            StateDoc::Named(name) => return Err(CliError::invalid(format!("{what}: unknown state builder {name:?}"))),
            StateDoc::Amplitudes(a) => ket_from(a, what)?,
            StateDoc::Basis { basis } => context(|| what.to_string(), Ket::basis(dim, *basis))?,
            StateDoc::Spin { spin } => {
                let dir = context(|| what.to_string(), Direction::new(spin.theta.radians()?, spin.phi.radians()?))?;
                spin_ket(&dir, parse_sign(&spin.sign)?)
            }
            StateDoc::Product { product } => {
                if factors.len() != self.space.factors().len() {
                    return Err(CliError::invalid(format!("{what}: products are only allowed for the whole space")));
                }
                let mut parts = Vec::with_capacity(product.len());
                for (i, p) in product.iter().enumerate() {
                    if matches!(p.state, StateDoc::Product { .. }) {
                        return Err(CliError::invalid(format!("{what}: nested product in part {i}")));
                    }
                    parts.push(self.state(&p.state, &p.factors, &format!("{what} part {i}"))?);
                }
                let groups: Vec<Vec<&str>> =
                    product.iter().map(|p| p.factors.iter().map(String::as_str).collect()).collect();
                let pairs: Vec<(&[&str], &Ket)> = groups.iter().map(Vec::as_slice).zip(&parts).collect();
                context(|| what.to_string(), self.space.compose_ket(&pairs))?
            }
        };
        if ket.dim() != dim {
            return Err(CliError::invalid(format!(
                "{what}: state has dimension {} but its factors have {dim}",
                ket.dim()
            )));
        }
        Ok(ket)
    }

    fn measurement(&self, m: &MeasurementDoc) -> Result<Measurement> {
        let what = || format!("measurement {:?}", m.name);
        let sys_dim = self.factor_dim(&m.system)?;
        let pointer_dim = self.factor_dim(&m.pointer)?;
        let (kets, sys_labels, out_labels): (Vec<Ket>, Vec<String>, Vec<String>) = match &m.basis {
            BasisDoc::Named(n) if n == "standard" => (
                (0..sys_dim).map(|k| Ket::basis(sys_dim, k)).collect::<chronicle_core::Result<_>>()?,
                (1..=sys_dim).map(|k| format!("{}{k}", m.system)).collect(),
                (1..=sys_dim).map(|k| format!("{}{k}", m.pointer)).collect(),
            ),
            BasisDoc::Named(n) => return Err(CliError::invalid(format!("{}: unknown basis {n:?}", what()))),
            BasisDoc::Spin { spin } => {
                let dir = spin.direction().map_err(|e| CliError::invalid(format!("{}: {e}", what())))?;
                let signs = [Sign::Plus, Sign::Minus];
                (
                    signs.iter().map(|s| spin_ket(&dir, *s)).collect(),
                    signs.iter().map(|s| spin_label(&dir, &m.system, *s)).collect(),
                    signs.iter().map(|s| format!("{}{}", m.pointer, s.symbol())).collect(),
                )
            }
            BasisDoc::Kets(list) => (
                list.iter().map(|a| ket_from(a, &what())).collect::<Result<_>>()?,
                (1..=list.len()).map(|k| format!("{}{k}", m.system)).collect(),
                (1..=list.len()).map(|k| format!("{}{k}", m.pointer)).collect(),
            ),
        };
        if kets.iter().any(|k| k.dim() != sys_dim) {
            return Err(CliError::invalid(format!("{}: basis vectors must have dimension {sys_dim}", what())));
        }
        if pointer_dim != kets.len() + 1 {
            return Err(CliError::invalid(format!(
                "{}: pointer {:?} must have dimension {} (ready state plus one per outcome), found {pointer_dim}",
                what(),
                m.pointer,
                kets.len() + 1
            )));
        }
        let sys_labels = m.system_labels.clone().unwrap_or(sys_labels);
        let out_labels = m.outcome_labels.clone().unwrap_or(out_labels);
        let ready = m.ready_label.clone().unwrap_or_else(|| format!("{}0", m.pointer));
        let mut spec = context(what, MeasurementSpec::new(kets, &sys_labels, &out_labels, self.tol))?;
        spec = context(what, spec.with_ready_label(ready, self.tol))?;
        if let Some(finals) = &m.final_states {
            let finals = finals.iter().map(|a| ket_from(a, &what())).collect::<Result<Vec<_>>>()?;
            spec = context(what, spec.with_final_states(finals, self.tol))?;
        }
        Ok(Measurement { spec, system: m.system.clone(), pointer: m.pointer.clone() })
    }

    fn lookup(&self, name: &str) -> Result<&Measurement> {
        self.measurements.get(name).ok_or_else(|| CliError::invalid(format!("unknown measurement {name:?}")))
    }

    fn matrix(&self, rows: &[Vec<Amplitude>], factors: Option<&[String]>, what: &str) -> Result<Operator> {
        let rows: Vec<Vec<Complex>> = rows.iter().map(|r| r.iter().map(|a| a.value()).collect()).collect();
        let local = context(|| what.to_string(), Operator::from_rows(rows))?;
        match factors {
            None => Ok(local),
            Some(fs) => {
                let labels: Vec<&str> = fs.iter().map(String::as_str).collect();
                context(|| what.to_string(), self.space.embed(&local, &labels))
            }
        }
    }

    fn dynamics(&self, intervals: usize) -> Result<Dynamics> {
        let steps_doc = &self.doc.dynamics;
        if steps_doc.len() != intervals {
            return Err(CliError::invalid(format!(
                "dynamics lists {} steps but the grid has {intervals} intervals",
                steps_doc.len()
            )));
        }
        let dim = self.space.dim();
        let mut steps = Vec::with_capacity(intervals);
        for (j, step) in steps_doc.iter().enumerate() {
            let what = format!("dynamics step {j}");
            let op = match step {
                StepDoc::Named(n) if n == "identity" => Operator::identity(dim),
                StepDoc::Named(n) => return Err(CliError::invalid(format!("{what}: unknown step {n:?}"))),
                StepDoc::Measure { measure } => {
                    let mut total = Operator::identity(dim);
                    for name in measure {
                        let m = self.lookup(name)?;
                        let u = context(|| what.clone(), build_measurement_unitary(&m.spec, self.tol))?;
                        let lifted =
                            context(|| what.clone(), self.space.embed(&u, &[m.system.as_str(), m.pointer.as_str()]))?;
                        total = &lifted * &total;
                    }
                    total
                }
                StepDoc::Unitary { unitary } => self.matrix(&unitary.matrix, unitary.factors.as_deref(), &what)?,
            };
            if op.dim() != dim {
                return Err(CliError::invalid(format!("{what}: operator has dimension {} instead of {dim}", op.dim())));
            }
            steps.push(op);
        }
        context(|| "dynamics".into(), Dynamics::new(steps, self.tol))
    }

    fn slot(&self, slot: &SlotDoc, evolved: &Ket, family: &str, time: usize) -> Result<Decomposition> {
        let what = || format!("family {family:?} slot {time}");
        let mut combined: Option<Decomposition> = None;
        for r in slot.refs() {
            let d = self.reference(r, evolved, &what())?;
            combined = Some(match combined {
                None => d,
                Some(c) => context(what, c.common_refinement(&d, self.tol))?,
            });
        }
        combined.ok_or_else(|| CliError::invalid(format!("{}: empty slot", what())))
    }

    fn reference(&self, r: &RefDoc, evolved: &Ket, what: &str) -> Result<Decomposition> {
        let ctx = || what.to_string();
        match r {
            RefDoc::Explicit(e) => {
                let mut members = Vec::with_capacity(e.projectors.len());
                for p in &e.projectors {
                    let op = self.matrix(&p.matrix, e.factors.as_deref(), what)?;
                    members.push(context(ctx, Projector::new(op, p.label.clone(), self.tol))?);
                }
                context(ctx, Decomposition::validate(members, self.space.dim(), self.tol))
            }
            RefDoc::Named(text) => {
                let (head, args) = split_call(text)
                    .ok_or_else(|| CliError::invalid(format!("{what}: cannot parse reference {text:?}")))?;
                match (head, args.as_slice()) {
                    ("identity", []) => Ok(Decomposition::trivial(self.space.dim())),
                    ("evolved", []) => Ok(Decomposition::binary(
                        context(ctx, Projector::onto(evolved, EVOLVED_LABEL))?,
                        EVOLVED_COMPLEMENT_LABEL,
                    )),
                    ("spin", [factor, theta, rest @ ..]) if rest.len() <= 1 => {
                        if self.factor_dim(factor)? != 2 {
                            return Err(CliError::invalid(format!(
                                "{what}: spin({factor}, ..) needs a two-dimensional factor"
                            )));
                        }
                        let theta = Angle::Expr(theta.to_string()).radians()?;
                        let phi = match rest.first() {
                            Some(p) => Angle::Expr(p.to_string()).radians()?,
                            None => 0.0,
                        };
                        let dir = context(ctx, Direction::new(theta, phi))?;
                        let local = context(ctx, spin_decomposition(&dir, factor, self.tol))?;
                        context(ctx, local.lift(&self.space, factor))
                    }
                    ("basis", [factor]) => {
                        let n = self.factor_dim(factor)?;
                        let kets = (0..n).map(|k| Ket::basis(n, k)).collect::<chronicle_core::Result<Vec<_>>>()?;
                        let labels: Vec<String> = (1..=n).map(|k| format!("{factor}{k}")).collect();
                        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
                        let local = context(ctx, Decomposition::from_basis(&kets, &refs, self.tol))?;
                        context(ctx, local.lift(&self.space, factor))
                    }
                    ("pointer", [name]) => {
                        let m = self.lookup(name)?;
                        let local = context(ctx, m.spec.pointer_decomposition(self.tol))?;
                        context(ctx, local.lift(&self.space, &m.pointer))
                    }
                    ("system", [name]) => {
                        let m = self.lookup(name)?;
                        let local = context(ctx, m.spec.system_decomposition(self.tol))?;
                        context(ctx, local.lift(&self.space, &m.system))
                    }
                    _ => Err(CliError::invalid(format!("{what}: unknown reference {text:?}"))),
                }
            }
        }
    }
}

/// `"name(a, b)"` → `("name", ["a", "b"])`; a bare word has no arguments.
fn split_call(text: &str) -> Option<(&str, Vec<&str>)> {
    let t = text.trim();
    match t.split_once('(') {
        None => Some((t, Vec::new())),
        Some((head, rest)) => {
            let inner = rest.strip_suffix(')')?;
            let args = if inner.trim().is_empty() { Vec::new() } else { inner.split(',').map(str::trim).collect() };
            Some((head.trim(), args))
        }
    }
}
