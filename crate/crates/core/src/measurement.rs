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

//! Idealized measurements: the unitary that couples a system basis to
//! orthogonal pointer states, the history families built on it, and the
//! collapse rule as a calculational shortcut for conditional probabilities.

use crate::error::{Error, Result};
use crate::framework::{negation, Decomposition, Projector};
use crate::histories::{Dynamics, HistoryFamily, TimeGrid, EVOLVED_COMPLEMENT_LABEL, EVOLVED_LABEL};
use crate::linalg::{extend_orthonormal, Complex, Ket, Operator, TensorSpace, RANK_TOL};

/// Factor label of the measured system in families built here.
pub const SYSTEM_FACTOR: &str = "s";
/// Factor label of the apparatus pointer.
pub const POINTER_FACTOR: &str = "M";
/// Default label of the ready state `|M0⟩`.
pub const READY_LABEL: &str = "M0";
/// Label of the pointer subspace outside `|M0⟩` and the outcome states,
/// present only when a custom pointer space is larger than `n + 1`.
pub const POINTER_REST_LABEL: &str = "M*";

/// Order in which standard basis vectors are tried when completing the
/// measurement unitary outside the specified subspace.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CompletionOrder {
    #[default]
    Forward,
    Reverse,
}

/// Declarative description of an idealized measurement
/// `|s^j⟩⊗|M0⟩ → |s̄^j⟩⊗|M^j⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSpec {
    system_basis: Vec<Ket>,
    system_labels: Vec<String>,
    pointer_ready: Ket,
    pointer_outcomes: Vec<Ket>,
    outcome_labels: Vec<String>,
    ready_label: String,
    final_states: Option<Vec<Ket>>,
    interval: usize,
    completion: CompletionOrder,
}

impl MeasurementSpec {
    /// A measurement of `system_basis` with the default pointer: dimension
    /// `n + 1`, ready state first, outcome `j` on basis vector `j + 1`.
    /// The interaction sits in interval 1, i.e. between `t_1` and `t_2`.
    pub fn new<S: AsRef<str>>(
        system_basis: Vec<Ket>,
        system_labels: &[S],
        outcome_labels: &[S],
        tol: f64,
    ) -> Result<Self> {
        let n = system_basis.len();
        let pointer_dim = n + 1;
        let spec = MeasurementSpec {
            system_basis,
            system_labels: system_labels.iter().map(|s| s.as_ref().to_string()).collect(),
            pointer_ready: Ket::basis(pointer_dim, 0)?,
            pointer_outcomes: (1..pointer_dim).map(|k| Ket::basis(pointer_dim, k)).collect::<Result<_>>()?,
            outcome_labels: outcome_labels.iter().map(|s| s.as_ref().to_string()).collect(),
            ready_label: READY_LABEL.to_string(),
            final_states: None,
            interval: 1,
            completion: CompletionOrder::Forward,
        };
        spec.validate(tol)?;
        Ok(spec)
    }

    /// Measurement in the standard basis of an `n`-dimensional system with
    /// labels `s1..sn` and `M1..Mn`.
    pub fn standard(n: usize, tol: f64) -> Result<Self> {
        let basis = (0..n).map(|j| Ket::basis(n, j)).collect::<Result<Vec<_>>>()?;
        let sys: Vec<String> = (1..=n).map(|j| format!("s{j}")).collect();
        let out: Vec<String> = (1..=n).map(|j| format!("M{j}")).collect();
        Self::new(basis, &sys, &out, tol)
    }

    pub fn with_pointer(mut self, ready: Ket, outcomes: Vec<Ket>, tol: f64) -> Result<Self> {
        self.pointer_ready = ready;
        self.pointer_outcomes = outcomes;
        self.validate(tol)?;
        Ok(self)
    }

    pub fn with_final_states(mut self, finals: Vec<Ket>, tol: f64) -> Result<Self> {
        self.final_states = Some(finals);
        self.validate(tol)?;
        Ok(self)
    }

    pub fn with_ready_label(mut self, label: impl Into<String>, tol: f64) -> Result<Self> {
        self.ready_label = label.into();
        self.validate(tol)?;
        Ok(self)
    }

    pub fn with_interval(mut self, interval: usize) -> Self {
        self.interval = interval;
        self
    }

    pub fn with_completion(mut self, order: CompletionOrder) -> Self {
        self.completion = order;
        self
    }

    fn validate(&self, tol: f64) -> Result<()> {
        let n = self.system_basis.len();
        if n == 0 {
            return Err(Error::SpecInconsistent("empty system basis".into()));
        }
        if self.system_labels.len() != n || self.outcome_labels.len() != n {
            return Err(Error::SpecInconsistent(format!(
                "{n} basis states but {} system labels and {} outcome labels",
                self.system_labels.len(),
                self.outcome_labels.len()
            )));
        }
        let mut labels: Vec<&str> = self.outcome_labels.iter().map(String::as_str).collect();
        labels.push(&self.ready_label);
        if let Some(dup) = labels.iter().enumerate().find(|(i, l)| labels[..*i].contains(l)) {
            return Err(Error::SpecInconsistent(format!("pointer label '{}' used twice", dup.1)));
        }
        if let Some(dup) = self.system_labels.iter().enumerate().find(|(i, l)| self.system_labels[..*i].contains(l)) {
            return Err(Error::SpecInconsistent(format!("system label '{}' used twice", dup.1)));
        }
        if self.system_basis.iter().any(|k| k.dim() != n) {
            return Err(Error::SpecInconsistent("system basis does not span its space".into()));
        }
        if !orthonormal(&self.system_basis, tol) {
            return Err(Error::SpecInconsistent("system basis is not orthonormal".into()));
        }
        if self.pointer_outcomes.len() != n {
            return Err(Error::SpecInconsistent(format!(
                "{} pointer outcomes for {n} system states",
                self.pointer_outcomes.len()
            )));
        }
        let pointer: Vec<Ket> =
            std::iter::once(self.pointer_ready.clone()).chain(self.pointer_outcomes.iter().cloned()).collect();
        if pointer.iter().any(|k| k.dim() != self.pointer_ready.dim()) || !orthonormal(&pointer, tol) {
            return Err(Error::SpecInconsistent(
                "pointer states must be orthonormal and orthogonal to the ready state".into(),
            ));
        }
        if let Some(finals) = &self.final_states {
            if finals.len() != n {
                return Err(Error::SpecInconsistent(format!("{} final states for {n} inputs", finals.len())));
            }
            if finals.iter().any(|k| k.dim() != n || !k.is_normalized(tol)) {
                return Err(Error::SpecInconsistent("final states must be normalized system kets".into()));
            }
        }
        Ok(())
    }

    pub fn system_dim(&self) -> usize {
        self.system_basis.len()
    }

    pub fn pointer_dim(&self) -> usize {
        self.pointer_ready.dim()
    }

    pub fn interval(&self) -> usize {
        self.interval
    }

    pub fn system_basis(&self) -> &[Ket] {
        &self.system_basis
    }

    pub fn pointer_ready(&self) -> &Ket {
        &self.pointer_ready
    }

    pub fn outcome_labels(&self) -> &[String] {
        &self.outcome_labels
    }

    /// `|s̄^j⟩`, defaulting to `|s^j⟩`.
    pub fn final_states(&self) -> &[Ket] {
        self.final_states.as_deref().unwrap_or(&self.system_basis)
    }

    pub fn is_nondestructive(&self, tol: f64) -> bool {
        self.final_states().iter().zip(&self.system_basis).all(|(a, b)| a.approx_eq(b, tol))
    }

    /// `{s^j}` on the system factor alone.
    pub fn system_decomposition(&self, tol: f64) -> Result<Decomposition> {
        let labels: Vec<&str> = self.system_labels.iter().map(String::as_str).collect();
        Decomposition::from_basis(&self.system_basis, &labels, tol)
    }

    /// `{M0, M^1, ..., M^n}` on the pointer factor alone, plus the rest of
    /// the pointer space when it is larger than `n + 1`.
    pub fn pointer_decomposition(&self, tol: f64) -> Result<Decomposition> {
        let dim = self.pointer_dim();
        let mut members = vec![Projector::onto(&self.pointer_ready, self.ready_label.as_str())?];
        for (k, l) in self.pointer_outcomes.iter().zip(&self.outcome_labels) {
            members.push(Projector::onto(k, l.as_str())?);
        }
        if dim > members.len() {
            let covered = members.iter().fold(Operator::zeros(dim), |acc, p| &acc + p.op());
            let covered = Projector::new_unchecked(covered, "covered");
            members.push(negation(&covered).with_label(POINTER_REST_LABEL));
        }
        Decomposition::validate(members, dim, tol)
    }

    pub fn space(&self) -> TensorSpace {
        TensorSpace::new([(SYSTEM_FACTOR, self.system_dim()), (POINTER_FACTOR, self.pointer_dim())])
            .expect("factor dims are positive")
    }
}

fn orthonormal(kets: &[Ket], tol: f64) -> bool {
    kets.iter().enumerate().all(|(i, a)| {
        kets.iter().enumerate().all(|(j, b)| {
            let expected = if i == j { 1.0 } else { 0.0 };
            (a.inner_unchecked(b) - Complex::new(expected, 0.0)).norm() <= tol
        })
    })
}

fn complete_basis(mut basis: Vec<Ket>, dim: usize, order: CompletionOrder) -> Result<Vec<Ket>> {
    let candidates: Vec<usize> = match order {
        CompletionOrder::Forward => (0..dim).collect(),
        CompletionOrder::Reverse => (0..dim).rev().collect(),
    };
    for k in candidates {
        if basis.len() == dim {
            break;
        }
        extend_orthonormal(&mut basis, &Ket::basis(dim, k)?, RANK_TOL);
    }
    if basis.len() != dim {
        return Err(Error::CompletionFailure { expected: dim, found: basis.len() });
    }
    Ok(basis)
}

/// Unitary on system ⊗ pointer with `U(|s^j⟩⊗|M0⟩) = |s̄^j⟩⊗|M^j⟩`,
/// completed on the orthogonal complement by Gram-Schmidt over the
/// standard basis in the spec's completion order.
pub fn build_measurement_unitary(spec: &MeasurementSpec, tol: f64) -> Result<Operator> {
    let inputs: Vec<Ket> = spec.system_basis.iter().map(|s| s.tensor(&spec.pointer_ready)).collect();
    let outputs: Vec<Ket> = spec.final_states().iter().zip(&spec.pointer_outcomes).map(|(s, m)| s.tensor(m)).collect();
    let dim = spec.system_dim() * spec.pointer_dim();
    let ins = complete_basis(inputs.clone(), dim, spec.completion)?;
    let outs = complete_basis(outputs.clone(), dim, spec.completion)?;
    let u = ins.iter().zip(&outs).fold(Operator::zeros(dim), |acc, (i, o)| &acc + &o.outer(i));
    if !u.is_unitary(tol) {
        return Err(Error::SpecInconsistent("completed operator is not unitary".into()));
    }
    for (j, (i, o)) in inputs.iter().zip(&outputs).enumerate() {
        if !(&u * i).approx_eq(o, tol) {
            return Err(Error::SpecInconsistent(format!("input {j} is not mapped as specified")));
        }
    }
    Ok(u)
}

fn measurement_setup(
    spec: &MeasurementSpec,
    coefficients: &[Complex],
    grid: &TimeGrid,
    tol: f64,
) -> Result<(TensorSpace, Ket, Dynamics)> {
    if grid.len() != 3 || spec.interval != 1 {
        return Err(Error::SpecInconsistent(format!(
            "measurement families need three times and the interaction in interval 1 (got {} times, interval {})",
            grid.len(),
            spec.interval
        )));
    }
    if coefficients.len() != spec.system_dim() {
        return Err(Error::DimMismatch { expected: spec.system_dim(), found: coefficients.len() });
    }
    let system = spec
        .system_basis
        .iter()
        .zip(coefficients)
        .fold(Ket::zeros(spec.system_dim())?, |acc, (s, c)| &acc + &s.scale(*c));
    if !system.is_normalized(tol) {
        return Err(Error::NotNormalized(system.norm()));
    }
    let initial = system.tensor(&spec.pointer_ready);
    let space = spec.space();
    let u = build_measurement_unitary(spec, tol)?;
    let dynamics = Dynamics::new(vec![Operator::identity(space.dim()), u], tol)?;
    Ok((space, initial, dynamics))
}

/// `Ψ0 ⊙ {s^j} ⊙ {M^k}` with `Ψ0 = (Σ c_j |s^j⟩) ⊗ |M0⟩`.
pub fn measurement_family(
    spec: &MeasurementSpec,
    coefficients: &[Complex],
    grid: &TimeGrid,
    tol: f64,
) -> Result<HistoryFamily> {
    let (space, initial, dynamics) = measurement_setup(spec, coefficients, grid, tol)?;
    let system = spec.system_decomposition(tol)?.lift(&space, SYSTEM_FACTOR)?;
    let pointer = spec.pointer_decomposition(tol)?.lift(&space, POINTER_FACTOR)?;
    HistoryFamily::new(initial, grid.clone(), dynamics, vec![system, pointer], tol)
}

fn require_nondestructive(spec: &MeasurementSpec, tol: f64) -> Result<()> {
    if spec.is_nondestructive(tol) {
        Ok(())
    } else {
        Err(Error::SpecInconsistent("measurement is destructive".into()))
    }
}

/// `Ψ0 ⊙ {s^j} ⊙ {s^l ⊗ M^k}` for a nondestructive measurement.
pub fn nondestructive_family(
    spec: &MeasurementSpec,
    coefficients: &[Complex],
    grid: &TimeGrid,
    tol: f64,
) -> Result<HistoryFamily> {
    require_nondestructive(spec, tol)?;
    let (space, initial, dynamics) = measurement_setup(spec, coefficients, grid, tol)?;
    let system = spec.system_decomposition(tol)?.lift(&space, SYSTEM_FACTOR)?;
    let pointer = spec.pointer_decomposition(tol)?.lift(&space, POINTER_FACTOR)?;
    let last = system.common_refinement(&pointer, tol)?;
    HistoryFamily::new(initial, grid.clone(), dynamics, vec![system, last], tol)
}

/// `Ψ0 ⊙ {Ψ1, I − Ψ1} ⊙ {s^l ⊗ M^k}` where `Ψ1` projects on the unitarily
/// evolved initial state at `t_1`.
pub fn textbook_family(
    spec: &MeasurementSpec,
    coefficients: &[Complex],
    grid: &TimeGrid,
    tol: f64,
) -> Result<HistoryFamily> {
    require_nondestructive(spec, tol)?;
    let (space, initial, dynamics) = measurement_setup(spec, coefficients, grid, tol)?;
    let evolved = dynamics.propagator(0, 1).apply(&initial)?;
    let first = Decomposition::binary(Projector::onto(&evolved, EVOLVED_LABEL)?, EVOLVED_COMPLEMENT_LABEL);
    let system = spec.system_decomposition(tol)?.lift(&space, SYSTEM_FACTOR)?;
    let pointer = spec.pointer_decomposition(tol)?.lift(&space, POINTER_FACTOR)?;
    let last = system.common_refinement(&pointer, tol)?;
    HistoryFamily::new(initial, grid.clone(), dynamics, vec![first, last], tol)
}

/// Projects and renormalizes: `Pψ / ‖Pψ‖`.
pub fn collapse(state: &Ket, outcome: &Projector, tol: f64) -> Result<Ket> {
    outcome.op().apply(state)?.normalized(tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histories::{probabilities, Event};
    use crate::linalg::DEFAULT_TOL;

    const TOL: f64 = DEFAULT_TOL;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    fn spin_z() -> MeasurementSpec {
        MeasurementSpec::new(
            vec![Ket::basis(2, 0).unwrap(), Ket::basis(2, 1).unwrap()],
            &["z+", "z-"],
            &["M+", "M-"],
            TOL,
        )
        .unwrap()
    }

    #[test]
    fn spin_z_unitary_maps_inputs() {
        let spec = spin_z();
        let u = build_measurement_unitary(&spec, TOL).unwrap();
        assert!(u.is_unitary(TOL));
        let ready = Ket::basis(3, 0).unwrap();
        for j in 0..2 {
            let input = Ket::basis(2, j).unwrap().tensor(&ready);
            let output = Ket::basis(2, j).unwrap().tensor(&Ket::basis(3, j + 1).unwrap());
            assert!((&u * &input).approx_eq(&output, TOL));
        }
    }

    #[test]
    fn destructive_final_states_are_honoured() {
        let h = 1.0 / 2f64.sqrt();
        let finals = vec![Ket::from_real(&[h, h]).unwrap(), Ket::from_real(&[h, h]).unwrap()];
        let spec = spin_z().with_final_states(finals.clone(), TOL).unwrap();
        assert!(!spec.is_nondestructive(TOL));
        let u = build_measurement_unitary(&spec, TOL).unwrap();
        let input = Ket::basis(2, 1).unwrap().tensor(&Ket::basis(3, 0).unwrap());
        let output = finals[1].tensor(&Ket::basis(3, 2).unwrap());
        assert!((&u * &input).approx_eq(&output, TOL));
        let grid = TimeGrid::uniform(3).unwrap();
        assert!(matches!(nondestructive_family(&spec, &[c(1.0), c(0.0)], &grid, TOL), Err(Error::SpecInconsistent(_))));
    }

    #[test]
    fn single_state_spec() {
        let spec = MeasurementSpec::standard(1, TOL).unwrap();
        let u = build_measurement_unitary(&spec, TOL).unwrap();
        assert_eq!(u.dim(), 2);
        let input = Ket::basis(2, 0).unwrap();
        assert!((&u * &input).approx_eq(&Ket::basis(2, 1).unwrap(), TOL));
    }

    #[test]
    fn spec_validation() {
        let bad = MeasurementSpec::new(
            vec![Ket::basis(2, 0).unwrap(), Ket::from_real(&[1.0, 1.0]).unwrap()],
            &["a", "b"],
            &["A", "B"],
            TOL,
        );
        assert!(matches!(bad, Err(Error::SpecInconsistent(_))));
        let bad = spin_z().with_pointer(
            Ket::basis(3, 0).unwrap(),
            vec![Ket::basis(3, 1).unwrap(), Ket::basis(3, 1).unwrap()],
            TOL,
        );
        assert!(bad.is_err());
        let bad = MeasurementSpec::new(vec![Ket::basis(1, 0).unwrap()], &["a"], &["A", "B"], TOL);
        assert!(bad.is_err());
        let bad = MeasurementSpec::new(vec![Ket::basis(1, 0).unwrap()], &["a"], &["M0"], TOL);
        assert!(matches!(bad, Err(Error::SpecInconsistent(_))));
        assert!(spin_z().with_final_states(vec![Ket::basis(2, 0).unwrap()], TOL).is_err());
    }

    #[test]
    fn larger_pointer_gets_rest_projector() {
        let spec = spin_z()
            .with_pointer(Ket::basis(4, 0).unwrap(), vec![Ket::basis(4, 1).unwrap(), Ket::basis(4, 3).unwrap()], TOL)
            .unwrap();
        let d = spec.pointer_decomposition(TOL).unwrap();
        assert_eq!(d.labels().collect::<Vec<_>>(), ["M0", "M+", "M-", POINTER_REST_LABEL]);
        assert!(build_measurement_unitary(&spec, TOL).unwrap().is_unitary(TOL));
    }

    #[test]
    fn measurement_family_probabilities() {
        let spec = spin_z();
        let (a, b) = (0.6, 0.8);
        let grid = TimeGrid::uniform(3).unwrap();
        let f = measurement_family(&spec, &[c(a), c(b)], &grid, TOL).unwrap();
        let t = probabilities(&f, TOL).unwrap();
        assert!((t.get(&["z+", "M+"]).unwrap() - a * a).abs() < 1e-12);
        assert!((t.get(&["z-", "M-"]).unwrap() - b * b).abs() < 1e-12);
        assert!(t.get(&["z+", "M-"]).unwrap().abs() < 1e-12);
        let pr = t.conditional(&Event::at(2, "M-"), &Event::at(1, "z-"), TOL).unwrap();
        assert!((pr - 1.0).abs() < 1e-12);
    }

    #[test]
    fn certain_outcome_has_single_history() {
        let grid = TimeGrid::uniform(3).unwrap();
        let f = measurement_family(&spin_z(), &[c(1.0), c(0.0)], &grid, TOL).unwrap();
        let t = probabilities(&f, TOL).unwrap();
        assert_eq!(t.nonzero(1e-12).count(), 1);
        assert!((t.get(&["z+", "M+"]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nondestructive_uniform() {
        let h = 1.0 / 2f64.sqrt();
        let grid = TimeGrid::uniform(3).unwrap();
        let f = nondestructive_family(&spin_z(), &[c(h), c(h)], &grid, TOL).unwrap();
        let t = probabilities(&f, TOL).unwrap();
        assert!((t.get(&["z+", "z+∧M+"]).unwrap() - 0.5).abs() < 1e-12);
        assert!((t.get(&["z-", "z-∧M-"]).unwrap() - 0.5).abs() < 1e-12);
        let pr = t.conditional(&Event::at(2, "M+"), &Event::at(2, "z+"), TOL).unwrap();
        assert!((pr - 1.0).abs() < 1e-12);
    }

    #[test]
    fn textbook_family_compatibility() {
        let grid = TimeGrid::uniform(3).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let spread = [c(h), c(h)];
        let tb = textbook_family(&spin_z(), &spread, &grid, TOL).unwrap();
        let mf = measurement_family(&spin_z(), &spread, &grid, TOL).unwrap();
        assert!(crate::histories::check_consistency(&tb, TOL).consistent);
        assert!(!tb.slots()[0].compatible(&mf.slots()[0], TOL));

        let sharp = [c(0.0), c(1.0)];
        let tb = textbook_family(&spin_z(), &sharp, &grid, TOL).unwrap();
        let mf = measurement_family(&spin_z(), &sharp, &grid, TOL).unwrap();
        assert!(tb.slots()[0].compatible(&mf.slots()[0], TOL));
    }

    #[test]
    fn unnormalized_coefficients_rejected() {
        let grid = TimeGrid::uniform(3).unwrap();
        assert!(matches!(measurement_family(&spin_z(), &[c(1.0), c(1.0)], &grid, TOL), Err(Error::NotNormalized(_))));
        let grid4 = TimeGrid::uniform(4).unwrap();
        assert!(matches!(
            measurement_family(&spin_z(), &[c(1.0), c(0.0)], &grid4, TOL),
            Err(Error::SpecInconsistent(_))
        ));
    }

    #[test]
    fn collapse_cases() {
        let h = 1.0 / 2f64.sqrt();
        let singlet = Ket::from_real(&[0.0, h, -h, 0.0]).unwrap();
        let za = Projector::new(Operator::diagonal(&[c(1.0), c(1.0), c(0.0), c(0.0)]), "z_a+", TOL).unwrap();
        let collapsed = collapse(&singlet, &za, TOL).unwrap();
        assert!(collapsed.approx_eq(&Ket::basis(4, 1).unwrap(), 1e-15));
        let again = collapse(&collapsed, &za, TOL).unwrap();
        assert!(again.approx_eq(&collapsed, 1e-15));
        let zb_minus = Operator::diagonal(&[c(0.0), c(1.0), c(0.0), c(1.0)]);
        let expectation = collapsed.inner(&(&zb_minus * &collapsed)).unwrap().re;
        assert!((expectation - 1.0).abs() < 1e-15);
        let orth = Projector::new(Operator::diagonal(&[c(1.0), c(0.0), c(0.0), c(0.0)]), "p", TOL).unwrap();
        assert!(matches!(collapse(&singlet, &orth, TOL), Err(Error::NullProjection(_))));
    }
}
