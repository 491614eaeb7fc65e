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

//! Dense complex linear algebra for small tensor-product Hilbert spaces.
//!
//! Amplitudes and matrix indices follow one ordering convention throughout
//! the crate: row-major, with the leftmost tensor factor varying slowest.
//! Predicates compare against an absolute tolerance on the largest entry
//! deviation.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex amplitude type used everywhere in the engine.
pub type Complex = Complex64;

/// Default absolute tolerance for predicate checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Threshold below which a residual vector is treated as linearly dependent.
pub const RANK_TOL: f64 = 1e-8;

pub(crate) const ZERO: Complex = Complex::new(0.0, 0.0);
pub(crate) const ONE: Complex = Complex::new(1.0, 0.0);

fn check_finite(values: &[Complex]) -> Result<()> {
    match values.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
        Some(pos) => Err(Error::NonFinite(pos)),
        None => Ok(()),
    }
}

fn max_abs_diff(a: &[Complex], b: &[Complex]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// A state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: Vec<Complex>,
}

impl Ket {
    pub fn new(amps: Vec<Complex>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidDim(0));
        }
        check_finite(&amps)?;
        Ok(Ket { amps })
    }

    /// Ket with purely real amplitudes.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex::new(x, 0.0)).collect())
    }

    /// The `index`-th standard basis vector of a `dim`-dimensional space.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 || index >= dim {
            return Err(Error::InvalidDim(dim));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Ket { amps })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDim(0));
        }
        Ok(Ket { amps: vec![ZERO; dim] })
    }

    pub(crate) fn from_vec_unchecked(amps: Vec<Complex>) -> Self {
        Ket { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Ket) -> Result<Complex> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &Ket) -> Complex {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, factor: Complex) -> Ket {
        Ket { amps: self.amps.iter().map(|a| a * factor).collect() }
    }

    /// Returns `self / ‖self‖`, failing when the norm is below `tol`.
    pub fn normalized(&self, tol: f64) -> Result<Ket> {
        let n = self.norm();
        if n <= tol {
            return Err(Error::NullProjection(n));
        }
        Ok(self.scale(Complex::new(1.0 / n, 0.0)))
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ket { amps }
    }

    /// `|self⟩⟨other|`.
    pub fn outer(&self, other: &Ket) -> Operator {
        let n = self.dim();
        assert_eq!(n, other.dim(), "outer product of kets with different dimensions");
        let mut data = Vec::with_capacity(n * n);
        for a in &self.amps {
            data.extend(other.amps.iter().map(|b| a * b.conj()));
        }
        Operator { dim: n, data }
    }

    /// Projector onto the ray through this ket. The ket need not be normalized.
    pub fn projector(&self) -> Result<Operator> {
        let n = self.norm_sqr();
        if n <= DEFAULT_TOL * DEFAULT_TOL {
            return Err(Error::NullProjection(n.sqrt()));
        }
        Ok(self.outer(self).scale(Complex::new(1.0 / n, 0.0)))
    }

    pub fn max_abs_diff(&self, other: &Ket) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs_diff(&self.amps, &other.amps)
    }

    pub fn approx_eq(&self, other: &Ket, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }
}

impl Add for &Ket {
    type Output = Ket;

    fn add(self, rhs: &Ket) -> Ket {
        assert_eq!(self.dim(), rhs.dim(), "adding kets with different dimensions");
        Ket { amps: self.amps.iter().zip(&rhs.amps).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Ket {
    type Output = Ket;

    fn sub(self, rhs: &Ket) -> Ket {
        assert_eq!(self.dim(), rhs.dim(), "subtracting kets with different dimensions");
        Ket { amps: self.amps.iter().zip(&rhs.amps).map(|(a, b)| a - b).collect() }
    }
}

/// A square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<Complex>,
}

impl Operator {
    pub fn new(dim: usize, data: Vec<Complex>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDim(0));
        }
        if data.len() != dim * dim {
            return Err(Error::DimMismatch { expected: dim * dim, found: data.len() });
        }
        check_finite(&data)?;
        Ok(Operator { dim, data })
    }

    pub fn from_rows(rows: Vec<Vec<Complex>>) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimMismatch { expected: dim, found: bad.len() });
        }
        Self::new(dim, rows.into_iter().flatten().collect())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Complex::new(x, 0.0)).collect()).collect())
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![ONE; dim])
    }

    pub fn zeros(dim: usize) -> Self {
        Operator { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn diagonal(values: &[Complex]) -> Self {
        let dim = values.len();
        let mut op = Self::zeros(dim);
        for (i, v) in values.iter().enumerate() {
            op.data[i * dim + i] = *v;
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.data[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex] {
        &self.data
    }

    pub fn column(&self, col: usize) -> Ket {
        Ket::from_vec_unchecked((0..self.dim).map(|r| self.get(r, col)).collect())
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex]> {
        self.data.chunks(self.dim)
    }

    pub fn adjoint(&self) -> Operator {
        let n = self.dim;
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            data.extend((0..n).map(|c| self.get(c, r).conj()));
        }
        Operator { dim: n, data }
    }

    pub fn scale(&self, factor: Complex) -> Operator {
        Operator { dim: self.dim, data: self.data.iter().map(|x| x * factor).collect() }
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    fn same_dim(&self, other_dim: usize) -> Result<()> {
        if self.dim != other_dim {
            return Err(Error::DimMismatch { expected: self.dim, found: other_dim });
        }
        Ok(())
    }

    pub fn multiply(&self, rhs: &Operator) -> Result<Operator> {
        self.same_dim(rhs.dim)?;
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                for (out, b) in data[r * n..(r + 1) * n].iter_mut().zip(row) {
                    *out += a * b;
                }
            }
        }
        Ok(Operator { dim: n, data })
    }

    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        self.same_dim(ket.dim())?;
        Ok(Ket::from_vec_unchecked(
            self.rows().map(|row| row.iter().zip(ket.amplitudes()).map(|(a, b)| a * b).sum()).collect(),
        ))
    }

    pub fn try_add(&self, rhs: &Operator) -> Result<Operator> {
        self.same_dim(rhs.dim)?;
        Ok(Operator { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() })
    }

    pub fn try_sub(&self, rhs: &Operator) -> Result<Operator> {
        self.same_dim(rhs.dim)?;
        Ok(Operator { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() })
    }

    /// Kronecker product, `self` being the slower-varying factor.
    pub fn tensor(&self, rhs: &Operator) -> Operator {
        let (n, m) = (self.dim, rhs.dim);
        let dim = n * m;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                if a == ZERO {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        data[(i * m + k) * dim + (j * m + l)] = a * rhs.get(k, l);
                    }
                }
            }
        }
        Operator { dim, data }
    }

    /// Largest entry modulus of `self - other`; infinite when dims differ.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        max_abs_diff(&self.data, &other.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Largest entry modulus of `self·other − other·self`.
    pub fn commutator_norm(&self, other: &Operator) -> f64 {
        match (self.multiply(other), other.multiply(self)) {
            (Ok(ab), Ok(ba)) => ab.max_abs_diff(&ba),
            _ => f64::INFINITY,
        }
    }

    pub fn commutes_with(&self, other: &Operator, tol: f64) -> bool {
        self.commutator_norm(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.max_abs_diff(&(self * self)) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (&self.adjoint() * self).max_abs_diff(&Operator::identity(self.dim)) <= tol
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        self.multiply(rhs).expect("operator product dimension mismatch")
    }
}

impl Mul<&Ket> for &Operator {
    type Output = Ket;

    fn mul(self, rhs: &Ket) -> Ket {
        self.apply(rhs).expect("operator/ket dimension mismatch")
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        self.try_add(rhs).expect("operator sum dimension mismatch")
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        self.try_sub(rhs).expect("operator difference dimension mismatch")
    }
}

pub fn tensor_ket(a: &Ket, b: &Ket) -> Ket {
    a.tensor(b)
}

pub fn tensor_op(a: &Operator, b: &Operator) -> Operator {
    a.tensor(b)
}

pub fn is_projector(op: &Operator, tol: f64) -> bool {
    op.is_projector(tol)
}

pub fn is_unitary(op: &Operator, tol: f64) -> bool {
    op.is_unitary(tol)
}

/// Orthonormal basis for the span of `vectors`.
///
/// Modified Gram-Schmidt with pivoting on the largest residual and one
/// re-orthogonalization pass. Residuals with norm at or below `rank_tol`
/// are dropped.
pub fn orthonormal_span(vectors: &[Ket], rank_tol: f64) -> Vec<Ket> {
    let mut residuals: Vec<Ket> = vectors.to_vec();
    let mut basis: Vec<Ket> = Vec::new();
    loop {
        let best = residuals.iter().enumerate().map(|(i, v)| (i, v.norm())).max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((idx, n)) = best else { break };
        if n <= rank_tol {
            break;
        }
        let mut v = residuals.swap_remove(idx);
        for q in &basis {
            let c = q.inner_unchecked(&v);
            v = &v - &q.scale(c);
        }
        let n = v.norm();
        if n <= rank_tol {
            continue;
        }
        let q = v.scale(Complex::new(1.0 / n, 0.0));
        for r in residuals.iter_mut() {
            let c = q.inner_unchecked(r);
            *r = &*r - &q.scale(c);
        }
        basis.push(q);
    }
    basis
}

/// Tries to extend an orthonormal `basis` by the component of `candidate`
/// orthogonal to it. Returns whether a vector was added.
pub fn extend_orthonormal(basis: &mut Vec<Ket>, candidate: &Ket, rank_tol: f64) -> bool {
    let mut v = candidate.clone();
    for _ in 0..2 {
        for q in basis.iter() {
            let c = q.inner_unchecked(&v);
            v = &v - &q.scale(c);
        }
    }
    let n = v.norm();
    if n <= rank_tol {
        return false;
    }
    basis.push(v.scale(Complex::new(1.0 / n, 0.0)));
    true
}

/// Projector onto the span of an orthonormal set.
pub fn span_projector(basis: &[Ket], dim: usize) -> Operator {
    basis.iter().fold(Operator::zeros(dim), |acc, q| &acc + &q.outer(q))
}

/// An ordered list of labelled tensor factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorSpace {
    factors: Vec<(String, usize)>,
}

impl TensorSpace {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let factors: Vec<(String, usize)> = factors.into_iter().map(|(l, d)| (l.into(), d)).collect();
        if factors.is_empty() {
            return Err(Error::InvalidDim(0));
        }
        for (i, (label, dim)) in factors.iter().enumerate() {
            if *dim == 0 {
                return Err(Error::InvalidDim(0));
            }
            if factors[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(TensorSpace { factors })
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|(_, d)| d).product()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.factors.iter().position(|(l, _)| l == label).ok_or_else(|| Error::UnknownFactor(label.to_string()))
    }

    pub fn factor_dim(&self, label: &str) -> Result<usize> {
        Ok(self.factors[self.position(label)?].1)
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.factors.len()];
        for k in (0..self.factors.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.factors[k + 1].1;
        }
        strides
    }

    /// For each full basis index, the index within the sub-space spanned by
    /// `positions` (in the given order) and the index with those digits zeroed.
    fn split_indices(&self, positions: &[usize]) -> Vec<(usize, usize)> {
        let strides = self.strides();
        (0..self.dim())
            .map(|i| {
                let mut sub = 0;
                let mut rest = i;
                for &p in positions {
                    let digit = (i / strides[p]) % self.factors[p].1;
                    sub = sub * self.factors[p].1 + digit;
                    rest -= digit * strides[p];
                }
                (sub, rest)
            })
            .collect()
    }

    fn resolve(&self, labels: &[&str]) -> Result<(Vec<usize>, usize)> {
        let mut positions = Vec::with_capacity(labels.len());
        for label in labels {
            let p = self.position(label)?;
            if positions.contains(&p) {
                return Err(Error::DuplicateLabel(label.to_string()));
            }
            positions.push(p);
        }
        let sub_dim = positions.iter().map(|&p| self.factors[p].1).product();
        Ok((positions, sub_dim))
    }

    /// Embeds `op`, acting on the factors named in `labels` (in that order),
    /// into the full space with the identity on every other factor.
    pub fn embed(&self, op: &Operator, labels: &[&str]) -> Result<Operator> {
        let (positions, sub_dim) = self.resolve(labels)?;
        if op.dim() != sub_dim {
            return Err(Error::DimMismatch { expected: sub_dim, found: op.dim() });
        }
        let split = self.split_indices(&positions);
        let n = self.dim();
        let mut data = vec![ZERO; n * n];
        for (i, &(si, ri)) in split.iter().enumerate() {
            for (j, &(sj, rj)) in split.iter().enumerate() {
                if ri == rj {
                    data[i * n + j] = op.get(si, sj);
                }
            }
        }
        Ok(Operator { dim: n, data })
    }

    /// `op` on the factor `label`, identity elsewhere.
    pub fn lift(&self, op: &Operator, label: &str) -> Result<Operator> {
        self.embed(op, &[label])
    }

    /// Product state assembled from kets on disjoint groups of factors that
    /// together cover the whole space.
    pub fn compose_ket(&self, parts: &[(&[&str], &Ket)]) -> Result<Ket> {
        let mut covered = vec![false; self.factors.len()];
        let mut resolved = Vec::with_capacity(parts.len());
        for (labels, ket) in parts {
            let (positions, sub_dim) = self.resolve(labels)?;
            if ket.dim() != sub_dim {
                return Err(Error::DimMismatch { expected: sub_dim, found: ket.dim() });
            }
            for &p in &positions {
                if covered[p] {
                    return Err(Error::DuplicateLabel(self.factors[p].0.clone()));
                }
                covered[p] = true;
            }
            resolved.push((self.split_indices(&positions), *ket));
        }
        if let Some(p) = covered.iter().position(|c| !c) {
            return Err(Error::UnknownFactor(format!("factor '{}' not covered by any part", self.factors[p].0)));
        }
        let amps = (0..self.dim())
            .map(|i| resolved.iter().map(|(split, ket)| ket.amplitudes()[split[i].0]).product())
            .collect();
        Ok(Ket::from_vec_unchecked(amps))
    }
}
