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

//! Frameworks: projective decompositions of the identity, their events,
//! compatibility and refinement, plus the lattice operations (meet, join,
//! negation) on single projectors.

use std::fmt;

use crate::error::{DecompositionViolation, Error, Result};
use crate::linalg::{orthonormal_span, span_projector, Complex, Ket, Operator, RANK_TOL};

/// Label reserved for the zero projector.
pub const ZERO_LABEL: &str = "0";
/// Label reserved for the identity.
pub const IDENTITY_LABEL: &str = "I";
/// Separator used when forming labels of refinement members.
pub const AND: char = '∧';

/// A labelled orthogonal projector.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    op: Operator,
    label: String,
}

impl Projector {
    pub fn new(op: Operator, label: impl Into<String>, tol: f64) -> Result<Self> {
        let label = label.into();
        if !op.is_projector(tol) {
            return Err(Error::NotProjector(label));
        }
        Ok(Projector { op, label })
    }

    pub(crate) fn new_unchecked(op: Operator, label: impl Into<String>) -> Self {
        Projector { op, label: label.into() }
    }

    pub fn zero(dim: usize) -> Self {
        Projector { op: Operator::zeros(dim), label: ZERO_LABEL.to_string() }
    }

    pub fn identity(dim: usize) -> Self {
        Projector { op: Operator::identity(dim), label: IDENTITY_LABEL.to_string() }
    }

    /// Projector onto the ray through `ket` (normalized internally).
    pub fn onto(ket: &Ket, label: impl Into<String>) -> Result<Self> {
        Ok(Projector { op: ket.projector()?, label: label.into() })
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Dimension of the range.
    pub fn rank(&self) -> usize {
        self.op.trace().re.round().max(0.0) as usize
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.op.max_abs() <= tol
    }

    pub fn approx_eq(&self, other: &Projector, tol: f64) -> bool {
        self.op.approx_eq(&other.op, tol)
    }

    /// `self ≤ other` in the subspace order, i.e. `other·self == self`.
    pub fn is_below(&self, other: &Projector, tol: f64) -> bool {
        (&other.op * &self.op).approx_eq(&self.op, tol)
    }

    pub fn lift(&self, space: &crate::linalg::TensorSpace, factor: &str) -> Result<Projector> {
        Ok(Projector { op: space.lift(&self.op, factor)?, label: self.label.clone() })
    }

    /// Components of a refinement label, e.g. `["z_a+", "z_b-"]`.
    pub fn label_components(&self) -> impl Iterator<Item = &str> {
        self.label.split(AND)
    }
}

impl fmt::Display for Projector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// `I − P`.
pub fn negation(p: &Projector) -> Projector {
    let label = match p.label() {
        ZERO_LABEL => IDENTITY_LABEL.to_string(),
        IDENTITY_LABEL => ZERO_LABEL.to_string(),
        l => match l.strip_prefix('¬') {
            Some(inner) => inner.to_string(),
            None => format!("¬{l}"),
        },
    };
    Projector::new_unchecked(&Operator::identity(p.dim()) - p.op(), label)
}

/// Projector onto the span of the ranges of `p` and `q`.
pub fn join(p: &Projector, q: &Projector) -> Projector {
    assert_eq!(p.dim(), q.dim(), "join of projectors with different dimensions");
    let dim = p.dim();
    let columns: Vec<Ket> = (0..dim).flat_map(|j| [p.op().column(j), q.op().column(j)]).collect();
    let basis = orthonormal_span(&columns, RANK_TOL);
    let label = format!("({}∨{})", p.label(), q.label());
    Projector::new_unchecked(span_projector(&basis, dim), label)
}

/// Projector onto the intersection of the ranges of `p` and `q`, obtained
/// as the complement of the span of the two complements.
pub fn meet(p: &Projector, q: &Projector) -> Projector {
    let complement = join(&negation(p), &negation(q));
    let label = format!("({}{AND}{})", p.label(), q.label());
    negation(&complement).with_label(label)
}

/// Both sides of the distributive law `(P∧Q)∨(P∧R) = P∧(Q∨R)`.
#[derive(Debug, Clone)]
pub struct DistributivityReport {
    pub lhs: Projector,
    pub rhs: Projector,
    pub equal: bool,
}

pub fn check_distributivity(p: &Projector, q: &Projector, r: &Projector, tol: f64) -> DistributivityReport {
    let lhs = join(&meet(p, q), &meet(p, r));
    let rhs = meet(p, &join(q, r));
    let equal = lhs.approx_eq(&rhs, tol);
    DistributivityReport { lhs, rhs, equal }
}

/// A validated projective decomposition of the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    members: Vec<Projector>,
    dim: usize,
}

impl Decomposition {
    /// Checks every defining condition and reports all violations at once.
    pub fn validate(candidates: Vec<Projector>, dim: usize, tol: f64) -> Result<Self> {
        let mut violations = Vec::new();
        for (i, p) in candidates.iter().enumerate() {
            if p.dim() != dim {
                violations.push(DecompositionViolation::DimMismatch { label: p.label().to_string(), dim: p.dim() });
                continue;
            }
            if !p.op().is_projector(tol) {
                violations.push(DecompositionViolation::NotProjector(p.label().to_string()));
            }
            if candidates[..i].iter().any(|q| q.label() == p.label()) {
                violations.push(DecompositionViolation::DuplicateLabel(p.label().to_string()));
            }
        }
        if violations.iter().any(|v| matches!(v, DecompositionViolation::DimMismatch { .. })) {
            return Err(Error::InvalidDecomposition(violations));
        }
        if candidates.is_empty() {
            violations.push(DecompositionViolation::SumNotIdentity { deviation: 1.0 });
            return Err(Error::InvalidDecomposition(violations));
        }

        let sum = candidates.iter().fold(Operator::zeros(dim), |acc, p| &acc + p.op());
        let deviation = sum.max_abs_diff(&Operator::identity(dim));
        if deviation > tol {
            violations.push(DecompositionViolation::SumNotIdentity { deviation });
        }
        for (i, p) in candidates.iter().enumerate() {
            for q in &candidates[i + 1..] {
                let deviation = (p.op() * q.op()).max_abs();
                if deviation > tol {
                    violations.push(DecompositionViolation::NotMutuallyOrthogonal {
                        first: p.label().to_string(),
                        second: q.label().to_string(),
                        deviation,
                    });
                }
            }
        }
        if violations.is_empty() {
            Ok(Decomposition { members: candidates, dim })
        } else {
            Err(Error::InvalidDecomposition(violations))
        }
    }

    /// The framework `{I}`.
    pub fn trivial(dim: usize) -> Self {
        Decomposition { members: vec![Projector::identity(dim)], dim }
    }

    /// Rank-one projectors onto an orthonormal basis.
    pub fn from_basis(basis: &[Ket], labels: &[&str], tol: f64) -> Result<Self> {
        if basis.len() != labels.len() {
            return Err(Error::DimMismatch { expected: basis.len(), found: labels.len() });
        }
        let dim = basis.first().map(Ket::dim).ok_or(Error::InvalidDim(0))?;
        let members = basis.iter().zip(labels).map(|(k, l)| Projector::onto(k, *l)).collect::<Result<Vec<_>>>()?;
        Self::validate(members, dim, tol)
    }

    /// `{P, I − P}`.
    pub fn binary(p: Projector, complement_label: &str) -> Self {
        let dim = p.dim();
        let q = negation(&p).with_label(complement_label);
        Decomposition { members: vec![p, q], dim }
    }

    pub fn members(&self) -> &[Projector] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.members.iter().map(Projector::label)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.members.iter().position(|p| p.label() == label)
    }

    pub fn member(&self, label: &str) -> Option<&Projector> {
        self.members.iter().find(|p| p.label() == label)
    }

    /// Re-checks the defining conditions of an already built decomposition.
    pub fn verify(&self, tol: f64) -> Result<()> {
        Self::validate(self.members.clone(), self.dim, tol).map(|_| ())
    }

    /// Embeds every member into a larger tensor space on `factor`.
    pub fn lift(&self, space: &crate::linalg::TensorSpace, factor: &str) -> Result<Self> {
        let members = self.members.iter().map(|p| p.lift(space, factor)).collect::<Result<Vec<_>>>()?;
        Ok(Decomposition { members, dim: space.dim() })
    }

    /// Event projector: the sum of the selected members.
    pub fn event(&self, labels: &[&str]) -> Result<Projector> {
        let mut op = Operator::zeros(self.dim);
        for l in labels {
            let p = self.member(l).ok_or_else(|| Error::LabelNotFound { time: 0, label: l.to_string() })?;
            op = &op + p.op();
        }
        let label = if labels.is_empty() { ZERO_LABEL.to_string() } else { labels.join("∨") };
        Ok(Projector::new_unchecked(op, label))
    }

    /// Whether `p` belongs to the Boolean event algebra generated by this
    /// decomposition, i.e. equals a sum of members.
    pub fn contains_event(&self, p: &Projector, tol: f64) -> bool {
        let sum =
            self.members.iter().filter(|m| m.is_below(p, tol)).fold(Operator::zeros(self.dim), |acc, m| &acc + m.op());
        sum.approx_eq(p.op(), tol)
    }

    /// Whether every member commutes with every member of `other`.
    pub fn compatible(&self, other: &Decomposition, tol: f64) -> bool {
        self.first_noncommuting(other, tol).is_none()
    }

    fn first_noncommuting(&self, other: &Decomposition, tol: f64) -> Option<(String, String)> {
        if self.dim != other.dim {
            return Some((format!("dim {}", self.dim), format!("dim {}", other.dim)));
        }
        for p in &self.members {
            for q in &other.members {
                if !p.op().commutes_with(q.op(), tol) {
                    return Some((p.label().to_string(), q.label().to_string()));
                }
            }
        }
        None
    }

    /// All nonzero products `P^μ Q^ν`, labelled `μ∧ν`.
    pub fn common_refinement(&self, other: &Decomposition, tol: f64) -> Result<Decomposition> {
        if let Some((a, b)) = self.first_noncommuting(other, tol) {
            return Err(Error::IncompatibleFrameworks(a, b));
        }
        let half = Complex::new(0.5, 0.0);
        let mut members = Vec::new();
        for p in &self.members {
            for q in &other.members {
                let prod = (&(p.op() * q.op()) + &(q.op() * p.op())).scale(half);
                if prod.trace().re < 0.5 {
                    continue;
                }
                members.push(Projector::new_unchecked(prod, format!("{}{AND}{}", p.label(), q.label())));
            }
        }
        Decomposition::validate(members, self.dim, tol)
    }
}

pub fn validate_decomposition(candidates: Vec<Projector>, dim: usize, tol: f64) -> Result<Decomposition> {
    Decomposition::validate(candidates, dim, tol)
}

pub fn compatible(f: &Decomposition, g: &Decomposition, tol: f64) -> bool {
    f.compatible(g, tol)
}

pub fn common_refinement(f: &Decomposition, g: &Decomposition, tol: f64) -> Result<Decomposition> {
    f.common_refinement(g, tol)
}
