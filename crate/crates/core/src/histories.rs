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

//! History families, chain kets, the consistency condition and the
//! probabilities it licenses.
//!
//! A family fixes an initial state at `t_0`, a unitary per grid interval and
//! one decomposition of the identity at each later time `t_1..t_f`. Times
//! are referred to by their grid index `j` (so slot `j` sits at `t_j`,
//! `j ≥ 1`); probability tables name their columns `t1, t2, ...`.

use std::fmt;

use crate::error::{Error, Result};
use crate::framework::{Decomposition, Projector, AND};
use crate::linalg::{Ket, Operator};

/// Strictly increasing time labels `t_0 < t_1 < ... < t_f`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidGrid(format!("need at least two times, got {}", times.len())));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid("non-finite time label".into()));
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!("{} is not after {}", w[1], w[0])));
        }
        Ok(TimeGrid { times })
    }

    /// `0, 1, ..., n-1`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i as f64).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn intervals(&self) -> usize {
        self.times.len() - 1
    }
}

/// One unitary per grid interval; `step(j)` is `T(t_{j+1}, t_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dynamics {
    steps: Vec<Operator>,
    dim: usize,
}

impl Dynamics {
    pub fn new(steps: Vec<Operator>, tol: f64) -> Result<Self> {
        let dim = steps.first().map(Operator::dim).ok_or(Error::InvalidGrid("no intervals".into()))?;
        for (j, u) in steps.iter().enumerate() {
            if u.dim() != dim {
                return Err(Error::DimMismatch { expected: dim, found: u.dim() });
            }
            if !u.is_unitary(tol) {
                return Err(Error::NotUnitary(j));
            }
        }
        Ok(Dynamics { steps, dim })
    }

    pub fn identity(dim: usize, intervals: usize) -> Self {
        Dynamics { steps: vec![Operator::identity(dim); intervals], dim }
    }

    pub fn steps(&self) -> &[Operator] {
        &self.steps
    }

    pub fn step(&self, interval: usize) -> &Operator {
        &self.steps[interval]
    }

    pub fn intervals(&self) -> usize {
        self.steps.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `T(t_to, t_from)` for grid indices; backwards propagation is the adjoint.
    pub fn propagator(&self, from: usize, to: usize) -> Operator {
        if to < from {
            return self.propagator(to, from).adjoint();
        }
        self.steps[from..to].iter().fold(Operator::identity(self.dim), |acc, u| u * &acc)
    }
}

/// One member label per time slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HistoryIndex(pub Vec<String>);

impl HistoryIndex {
    pub fn new<S: AsRef<str>>(labels: &[S]) -> Self {
        HistoryIndex(labels.iter().map(|s| s.as_ref().to_string()).collect())
    }

    pub fn labels(&self) -> &[String] {
        &self.0
    }
}

impl fmt::Display for HistoryIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("; "))
    }
}

/// Initial state, dynamics and one decomposition per later time.
#[derive(Debug, Clone)]
pub struct HistoryFamily {
    initial: Ket,
    grid: TimeGrid,
    dynamics: Dynamics,
    slots: Vec<Decomposition>,
}

impl HistoryFamily {
    pub fn new(initial: Ket, grid: TimeGrid, dynamics: Dynamics, slots: Vec<Decomposition>, tol: f64) -> Result<Self> {
        if !initial.is_normalized(tol) {
            return Err(Error::NotNormalized(initial.norm()));
        }
        if dynamics.intervals() != grid.intervals() {
            return Err(Error::InvalidGrid(format!(
                "{} intervals of dynamics for a grid of {} times",
                dynamics.intervals(),
                grid.len()
            )));
        }
        if slots.len() != grid.intervals() {
            return Err(Error::InvalidGrid(format!(
                "{} decompositions for a grid of {} times",
                slots.len(),
                grid.len()
            )));
        }
        let dim = initial.dim();
        if dynamics.dim() != dim {
            return Err(Error::DimMismatch { expected: dim, found: dynamics.dim() });
        }
        if let Some(d) = slots.iter().find(|d| d.dim() != dim) {
            return Err(Error::DimMismatch { expected: dim, found: d.dim() });
        }
        Ok(HistoryFamily { initial, grid, dynamics, slots })
    }

    pub fn initial(&self) -> &Ket {
        &self.initial
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.dynamics
    }

    pub fn slots(&self) -> &[Decomposition] {
        &self.slots
    }

    /// Decomposition at grid time `t_time` (`time ≥ 1`).
    pub fn slot(&self, time: usize) -> Option<&Decomposition> {
        time.checked_sub(1).and_then(|j| self.slots.get(j))
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    pub fn history_count(&self) -> usize {
        self.slots.iter().map(Decomposition::len).product()
    }

    /// All member-index tuples, lexicographic by slot then member order.
    pub fn index_tuples(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for slot in &self.slots {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..slot.len()).map(move |m| {
                        let mut next = prefix.clone();
                        next.push(m);
                        next
                    })
                })
                .collect();
        }
        out
    }

    pub fn history_index(&self, members: &[usize]) -> HistoryIndex {
        HistoryIndex(self.slots.iter().zip(members).map(|(d, &m)| d.members()[m].label().to_string()).collect())
    }

    pub fn resolve(&self, index: &HistoryIndex) -> Result<Vec<usize>> {
        if index.0.len() != self.slots.len() {
            return Err(Error::DimMismatch { expected: self.slots.len(), found: index.0.len() });
        }
        self.slots
            .iter()
            .zip(&index.0)
            .enumerate()
            .map(|(j, (d, l))| d.index_of(l).ok_or_else(|| Error::LabelNotFound { time: j + 1, label: l.clone() }))
            .collect()
    }

    /// `P_f U_f ... P_1 U_1 |Ψ0⟩`.
    pub fn chain_ket(&self, index: &HistoryIndex) -> Result<Ket> {
        let members = self.resolve(index)?;
        Ok(self.chain_ket_by_members(&members))
    }

    fn chain_ket_by_members(&self, members: &[usize]) -> Ket {
        let mut ket = self.initial.clone();
        for (j, (slot, &m)) in self.slots.iter().zip(members).enumerate() {
            ket = self.dynamics.step(j) * &ket;
            ket = slot.members()[m].op() * &ket;
        }
        ket
    }

    /// Chain kets of every history, in enumeration order. Prefixes are
    /// shared, so each projector is applied once per distinct prefix.
    pub fn chain_kets(&self) -> Vec<(Vec<usize>, Ket)> {
        let mut layer = vec![(Vec::new(), self.initial.clone())];
        for (j, slot) in self.slots.iter().enumerate() {
            let u = self.dynamics.step(j);
            layer = layer
                .into_iter()
                .flat_map(|(prefix, ket)| {
                    let evolved = u * &ket;
                    slot.members()
                        .iter()
                        .enumerate()
                        .map(|(m, p)| {
                            let mut idx = prefix.clone();
                            idx.push(m);
                            (idx, p.op() * &evolved)
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        layer
    }

    /// The same family without its last time slot.
    pub fn truncate_last(&self) -> Result<HistoryFamily> {
        let times = self.grid.times()[..self.grid.len() - 1].to_vec();
        let grid = TimeGrid::new(times)?;
        let n = self.slots.len() - 1;
        Ok(HistoryFamily {
            initial: self.initial.clone(),
            grid,
            dynamics: Dynamics { steps: self.dynamics.steps[..n].to_vec(), dim: self.dynamics.dim },
            slots: self.slots[..n].to_vec(),
        })
    }

    /// Slot-by-slot compatibility with another family on the same space and grid.
    pub fn compatible_with(&self, other: &HistoryFamily, tol: f64) -> Result<bool> {
        if self.slots.len() != other.slots.len() {
            return Err(Error::GridMismatch(format!("{} slots vs {} slots", self.slots.len(), other.slots.len())));
        }
        if self.dim() != other.dim() {
            return Err(Error::GridMismatch(format!("dimension {} vs {}", self.dim(), other.dim())));
        }
        Ok(self.slots.iter().zip(&other.slots).all(|(a, b)| a.compatible(b, tol)))
    }
}

/// Outcome of evaluating the consistency condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub worst_pair: Option<(HistoryIndex, HistoryIndex)>,
    pub worst_overlap: f64,
}

/// Checks `⟨α|β⟩ = 0` for all distinct histories, with the criterion
/// `|⟨α|β⟩| ≤ tol · max(1, ‖α‖‖β‖)`.
pub fn check_consistency(family: &HistoryFamily, tol: f64) -> ConsistencyReport {
    let kets = family.chain_kets();
    let norms: Vec<f64> = kets.iter().map(|(_, k)| k.norm()).collect();
    let mut worst: Option<(usize, usize, f64, f64)> = None;
    for i in 0..kets.len() {
        if norms[i] == 0.0 {
            continue;
        }
        for j in i + 1..kets.len() {
            if norms[j] == 0.0 {
                continue;
            }
            let overlap = kets[i].1.inner_unchecked(&kets[j].1).norm();
            let ratio = overlap / f64::max(1.0, norms[i] * norms[j]);
            if worst.is_none_or(|w| ratio > w.3) {
                worst = Some((i, j, overlap, ratio));
            }
        }
    }
    match worst {
        None => ConsistencyReport { consistent: true, worst_pair: None, worst_overlap: 0.0 },
        Some((i, j, overlap, ratio)) => ConsistencyReport {
            consistent: ratio <= tol,
            worst_pair: Some((family.history_index(&kets[i].0), family.history_index(&kets[j].0))),
            worst_overlap: overlap,
        },
    }
}

/// `Pr(α) = ⟨α|α⟩` for every history; refuses inconsistent families.
pub fn probabilities(family: &HistoryFamily, tol: f64) -> Result<ProbabilityTable> {
    let report = check_consistency(family, tol);
    if !report.consistent {
        let (first, second) = report.worst_pair.expect("inconsistency needs a pair");
        return Err(Error::InconsistentFamily { first: first.0, second: second.0, overlap: report.worst_overlap });
    }
    let entries =
        family.chain_kets().into_iter().map(|(idx, ket)| (family.history_index(&idx), ket.norm_sqr())).collect();
    Ok(ProbabilityTable::new(time_columns(family.slots().len()), entries))
}

fn time_columns(n: usize) -> Vec<String> {
    (1..=n).map(|j| format!("t{j}")).collect()
}

/// Born rule: `⟨Ψ0| T† P^α T |Ψ0⟩` for each member of `decomposition`,
/// where `propagator` is `T(t_1, t_0)`.
pub fn born_rule(initial: &Ket, propagator: &Operator, decomposition: &Decomposition) -> Result<ProbabilityTable> {
    let back = propagator.adjoint();
    let mut entries = Vec::with_capacity(decomposition.len());
    for p in decomposition.members() {
        let sandwiched = back.multiply(&p.op().multiply(propagator)?)?;
        let pr = initial.inner(&sandwiched.apply(initial)?)?.re;
        entries.push((HistoryIndex(vec![p.label().to_string()]), pr));
    }
    Ok(ProbabilityTable::new(time_columns(1), entries))
}

/// The forward and backward pre-probability routes to the same number:
/// `|⟨Φ|U Ψ0⟩|²` and `|⟨U†Φ|Ψ0⟩|²`.
pub fn pre_probability_pair(initial: &Ket, propagator: &Operator, target: &Ket) -> Result<(f64, f64)> {
    let forward_state = propagator.apply(initial)?;
    let forward = target.inner(&forward_state)?.norm_sqr();
    let backward_target = propagator.adjoint().apply(target)?;
    let backward = backward_target.inner(initial)?.norm_sqr();
    Ok((forward, backward))
}

/// Label of the evolved-state projector in a unitary family.
pub const EVOLVED_LABEL: &str = "Psi";
/// Label of its complement.
pub const EVOLVED_COMPLEMENT_LABEL: &str = "I-Psi";

/// The family whose decomposition at each `t_j` is `{|Ψ(t_j)⟩⟨Ψ(t_j)|, I − ...}`.
pub fn unitary_family(initial: &Ket, dynamics: &Dynamics, grid: &TimeGrid, tol: f64) -> Result<HistoryFamily> {
    if !initial.is_normalized(tol) {
        return Err(Error::NotNormalized(initial.norm()));
    }
    let mut slots = Vec::with_capacity(dynamics.intervals());
    let mut state = initial.clone();
    for u in dynamics.steps() {
        state = u.apply(&state)?;
        let p = Projector::onto(&state, EVOLVED_LABEL)?;
        slots.push(Decomposition::binary(p, EVOLVED_COMPLEMENT_LABEL));
    }
    HistoryFamily::new(initial.clone(), grid.clone(), dynamics.clone(), slots, tol)
}

/// A conjunction of per-time conditions on history labels.
///
/// A condition at time `j` matches a history whose label at `t_j` equals one
/// of the alternatives, or has one of them as a `∧`-component (so `"z_b-"`
/// matches `"z_a+∧z_b-"`).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Event {
    clauses: Vec<(String, Vec<String>)>,
}

impl Event {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn at(time: usize, label: &str) -> Self {
        Self::new().and(time, label)
    }

    pub fn and(self, time: usize, label: &str) -> Self {
        self.and_any(time, &[label])
    }

    pub fn and_any(mut self, time: usize, labels: &[&str]) -> Self {
        self.clauses.push((format!("t{time}"), labels.iter().map(|s| s.to_string()).collect()));
        self
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn conjoin(mut self, other: &Event) -> Self {
        self.clauses.extend(other.clauses.iter().cloned());
        self
    }
}

fn label_matches(label: &str, wanted: &str) -> bool {
    label == wanted || label.split(AND).any(|c| c == wanted)
}

/// Which part of a column survives a marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct Keep {
    pub time: usize,
    /// When set, each label is coarsened to its unique component in this list.
    pub among: Option<Vec<String>>,
}

impl Keep {
    pub fn time(time: usize) -> Self {
        Keep { time, among: None }
    }

    pub fn component(time: usize, among: &[&str]) -> Self {
        Keep { time, among: Some(among.iter().map(|s| s.to_string()).collect()) }
    }
}

/// Probabilities over label tuples, one column per retained time.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    columns: Vec<String>,
    entries: Vec<(HistoryIndex, f64)>,
}

impl ProbabilityTable {
    pub fn new(columns: Vec<String>, entries: Vec<(HistoryIndex, f64)>) -> Self {
        ProbabilityTable { columns, entries }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn entries(&self) -> &[(HistoryIndex, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    pub fn get<S: AsRef<str>>(&self, labels: &[S]) -> Option<f64> {
        self.entries
            .iter()
            .find(|(h, _)| h.0.len() == labels.len() && h.0.iter().zip(labels).all(|(a, b)| a == b.as_ref()))
            .map(|(_, p)| *p)
    }

    /// Entries above `threshold`.
    pub fn nonzero(&self, threshold: f64) -> impl Iterator<Item = &(HistoryIndex, f64)> {
        self.entries.iter().filter(move |(_, p)| *p > threshold)
    }

    fn column(&self, name: &str) -> Result<usize> {
        self.columns.iter().position(|c| c == name).ok_or_else(|| Error::InvalidEvent(format!("no column {name}")))
    }

    fn matcher(&self, event: &Event) -> Result<Vec<(usize, Vec<String>)>> {
        event.clauses.iter().map(|(col, alts)| Ok((self.column(col)?, alts.clone()))).collect()
    }

    fn matches(clauses: &[(usize, Vec<String>)], history: &HistoryIndex) -> bool {
        clauses.iter().all(|(c, alts)| alts.iter().any(|a| label_matches(&history.0[*c], a)))
    }

    pub fn probability(&self, event: &Event) -> Result<f64> {
        let clauses = self.matcher(event)?;
        Ok(self.entries.iter().filter(|(h, _)| Self::matches(&clauses, h)).map(|(_, p)| p).sum())
    }

    /// `Pr(target | given)`.
    pub fn conditional(&self, given: &Event, target: &Event, tol: f64) -> Result<f64> {
        let denom = self.probability(given)?;
        if denom <= tol {
            return Err(Error::ConditionOnNullEvent(denom));
        }
        let joint = given.clone().conjoin(target);
        Ok(self.probability(&joint)? / denom)
    }

    /// Sums over every column not kept. Kept columns appear in `keep` order;
    /// rows appear in order of first occurrence.
    pub fn marginal(&self, keep: &[Keep]) -> Result<ProbabilityTable> {
        let mut plan = Vec::with_capacity(keep.len());
        for k in keep {
            plan.push((self.column(&format!("t{}", k.time))?, k.among.as_deref()));
        }
        let mut rows: Vec<(HistoryIndex, f64)> = Vec::new();
        for (h, p) in &self.entries {
            let mut labels = Vec::with_capacity(plan.len());
            for (c, among) in &plan {
                let full = &h.0[*c];
                let label = match among {
                    None => full.clone(),
                    Some(list) => {
                        let found: Vec<&String> = list.iter().filter(|w| label_matches(full, w)).collect();
                        match found.as_slice() {
                            [one] => (*one).clone(),
                            _ => {
                                return Err(Error::InvalidEvent(format!(
                                    "label '{full}' matches {} of {:?}",
                                    found.len(),
                                    list
                                )))
                            }
                        }
                    }
                };
                labels.push(label);
            }
            let key = HistoryIndex(labels);
            match rows.iter_mut().find(|(k, _)| *k == key) {
                Some(row) => row.1 += p,
                None => rows.push((key, *p)),
            }
        }
        let columns = plan.iter().map(|(c, _)| self.columns[*c].clone()).collect();
        Ok(ProbabilityTable { columns, entries: rows })
    }

    /// Total-variation distance to another table over the same label tuples.
    pub fn total_variation(&self, other: &ProbabilityTable) -> f64 {
        let mut keys: Vec<&HistoryIndex> = self.entries.iter().map(|(h, _)| h).collect();
        for (h, _) in &other.entries {
            if !keys.contains(&h) {
                keys.push(h);
            }
        }
        let lookup =
            |t: &ProbabilityTable, h: &HistoryIndex| t.entries.iter().find(|(k, _)| k == h).map_or(0.0, |(_, p)| *p);
        0.5 * keys.iter().map(|h| (lookup(self, h) - lookup(other, h)).abs()).sum::<f64>()
    }
}
