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

//! Random states, unitaries and decompositions for property checks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::framework::{Decomposition, Projector};
use crate::linalg::{orthonormal_span, span_projector, Complex, Ket, Operator, RANK_TOL};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Unnormalized vector with i.i.d. complex Gaussian entries.
pub fn gaussian_ket<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Ket {
    Ket::new((0..dim).map(|_| gaussian(rng)).collect()).expect("finite samples")
}

/// Haar-distributed unit vector.
pub fn random_ket<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Ket {
    loop {
        if let Ok(k) = gaussian_ket(rng, dim).normalized(RANK_TOL) {
            return k;
        }
    }
}

pub fn random_operator<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Operator {
    Operator::new(dim, (0..dim * dim).map(|_| gaussian(rng)).collect()).expect("finite samples")
}

/// Random orthonormal basis, obtained by orthonormalizing Gaussian vectors.
pub fn random_basis<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Ket> {
    loop {
        let vectors: Vec<Ket> = (0..dim).map(|_| gaussian_ket(rng, dim)).collect();
        let basis = orthonormal_span(&vectors, RANK_TOL);
        if basis.len() == dim {
            return basis;
        }
    }
}

/// Unitary whose columns form a random orthonormal basis.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Operator {
    let basis = random_basis(rng, dim);
    let mut data = vec![Complex::new(0.0, 0.0); dim * dim];
    for (c, k) in basis.iter().enumerate() {
        for (r, a) in k.amplitudes().iter().enumerate() {
            data[r * dim + c] = *a;
        }
    }
    Operator::new(dim, data).expect("finite entries")
}

/// Random decomposition: a random basis split into `parts` nonempty groups
/// (`1 ≤ parts ≤ dim`), members labelled `p0, p1, ...`.
pub fn random_decomposition<R: Rng + ?Sized>(rng: &mut R, dim: usize, parts: usize) -> Decomposition {
    assert!(parts >= 1 && parts <= dim, "need 1 <= parts <= dim");
    let basis = random_basis(rng, dim);
    let mut groups: Vec<Vec<Ket>> = vec![Vec::new(); parts];
    for (i, k) in basis.into_iter().enumerate() {
        let g = if i < parts { i } else { rng.random_range(0..parts) };
        groups[g].push(k);
    }
    let members = groups
        .iter()
        .enumerate()
        .map(|(i, g)| Projector::new_unchecked(span_projector(g, dim), format!("p{i}")))
        .collect();
    Decomposition::validate(members, dim, 1e-9).expect("orthonormal groups form a decomposition")
}
