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

//! Two spin-half particles in the singlet state, with and without
//! measuring apparatus, and the correlation functions derived from the
//! two-apparatus outcome tables.
//!
//! Factor order is `a ⊗ b` without apparatus, `a ⊗ M ⊗ b` with one and
//! `a ⊗ M ⊗ b ⊗ N` with two. Grids are `t0 < t1 < t2` without apparatus
//! and `t0 < ... < t3` with, the interactions occupying `(t2, t3)`.
//!
//! Member labels read `<axis>_<particle><sign>`, e.g. `z_a+` or `w_b-`,
//! refined products join them with `∧`. Pointer labels are `M0, M+, M-`
//! and `N0, N+, N-`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;

use crate::error::{Error, Result};
use crate::framework::{Decomposition, Projector};
use crate::histories::{probabilities, Dynamics, HistoryFamily, Keep, ProbabilityTable, TimeGrid};
use crate::linalg::{Complex, Ket, Operator, TensorSpace};
use crate::measurement::{build_measurement_unitary, MeasurementSpec};

pub const PARTICLE_A: &str = "a";
pub const PARTICLE_B: &str = "b";
pub const APPARATUS_A: &str = "M";
pub const APPARATUS_B: &str = "N";

const NAME_TOL: f64 = 1e-12;

/// A direction on the unit sphere, `theta ∈ [0, π]`, `phi ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(0.0..TAU).contains(&phi) {
            return Err(Error::InvalidDirection { theta, phi });
        }
        Ok(Direction { theta, phi })
    }

    pub fn z() -> Self {
        Direction { theta: 0.0, phi: 0.0 }
    }

    pub fn minus_z() -> Self {
        Direction { theta: PI, phi: 0.0 }
    }

    pub fn x() -> Self {
        Direction { theta: PI / 2.0, phi: 0.0 }
    }

    pub fn y() -> Self {
        Direction { theta: PI / 2.0, phi: PI / 2.0 }
    }

    /// Direction in the x-z plane at `angle` from +z towards +x; any real
    /// angle is accepted and folded into the canonical ranges.
    pub fn in_xz_plane(angle: f64) -> Self {
        let a = angle.rem_euclid(TAU);
        if a <= PI {
            Direction { theta: a, phi: 0.0 }
        } else {
            Direction { theta: TAU - a, phi: PI }
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Angle between two directions.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        let (u, v) = (self.unit_vector(), other.unit_vector());
        let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
        dot.clamp(-1.0, 1.0).acos()
    }

    /// Axis name used in labels: `z`, `x`, `y`, or `w` for anything else.
    pub fn name(&self) -> &'static str {
        let close = |a: f64, b: f64| (a - b).abs() <= NAME_TOL;
        if close(self.theta, 0.0) {
            "z"
        } else if close(self.theta, PI / 2.0) && close(self.phi, 0.0) {
            "x"
        } else if close(self.theta, PI / 2.0) && close(self.phi, PI / 2.0) {
            "y"
        } else {
            "w"
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(theta={}, phi={})", self.theta, self.phi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `|w^+⟩ = cos(θ/2)|z^+⟩ + e^{iφ} sin(θ/2)|z^−⟩`, and the orthogonal `|w^−⟩`.
pub fn spin_ket(direction: &Direction, sign: Sign) -> Ket {
    let (s, c) = (direction.theta / 2.0).sin_cos();
    let phase = Complex::from_polar(1.0, direction.phi);
    let amps = match sign {
        Sign::Plus => vec![Complex::new(c, 0.0), phase * s],
        Sign::Minus => vec![Complex::new(s, 0.0), -phase * c],
    };
    Ket::new(amps).expect("finite spin amplitudes")
}

/// Label such as `z_a+`.
pub fn spin_label(direction: &Direction, particle: &str, sign: Sign) -> String {
    format!("{}_{}{}", direction.name(), particle, sign.symbol())
}

/// Rank-one projector on `|w^±⟩`, labelled `z+`, `w-` and so on.
pub fn spin_projector(direction: &Direction, sign: Sign) -> Projector {
    Projector::onto(&spin_ket(direction, sign), format!("{}{}", direction.name(), sign.symbol()))
        .expect("spin kets are normalized")
}

/// `{w^+, w^−}` on one particle, with particle-qualified labels.
pub fn spin_decomposition(direction: &Direction, particle: &str, tol: f64) -> Result<Decomposition> {
    let signs = [Sign::Plus, Sign::Minus];
    let kets: Vec<Ket> = signs.iter().map(|s| spin_ket(direction, *s)).collect();
    let labels: Vec<String> = signs.iter().map(|s| spin_label(direction, particle, *s)).collect();
    let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
    Decomposition::from_basis(&kets, &labels, tol)
}

/// `(|z_a^+ z_b^−⟩ − |z_a^− z_b^+⟩)/√2`.
pub fn singlet() -> Ket {
    Ket::from_real(&[0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0]).expect("finite amplitudes")
}

fn spin_pair_slot(space: &TensorSpace, wa: &Direction, wb: &Direction, tol: f64) -> Result<Decomposition> {
    let a = spin_decomposition(wa, PARTICLE_A, tol)?.lift(space, PARTICLE_A)?;
    let b = spin_decomposition(wb, PARTICLE_B, tol)?.lift(space, PARTICLE_B)?;
    a.common_refinement(&b, tol)
}

/// `ψ0 ⊙ {wa_a^±}⊗{wb_b^±} ⊙ {wa_a^±}⊗{wb_b^±}` with trivial dynamics.
pub fn family_no_measurement(wa: &Direction, wb: &Direction, tol: f64) -> Result<HistoryFamily> {
    let space = TensorSpace::new([(PARTICLE_A, 2), (PARTICLE_B, 2)])?;
    let slot = spin_pair_slot(&space, wa, wb, tol)?;
    HistoryFamily::new(
        singlet(),
        TimeGrid::uniform(3)?,
        Dynamics::identity(space.dim(), 2),
        vec![slot.clone(), slot],
        tol,
    )
}

fn spin_measurement(direction: &Direction, particle: &str, apparatus: &str, tol: f64) -> Result<MeasurementSpec> {
    let kets = vec![spin_ket(direction, Sign::Plus), spin_ket(direction, Sign::Minus)];
    let system = [spin_label(direction, particle, Sign::Plus), spin_label(direction, particle, Sign::Minus)];
    let outcomes = [format!("{apparatus}+"), format!("{apparatus}-")];
    Ok(MeasurementSpec::new(kets, &system, &outcomes, tol)?
        .with_ready_label(format!("{apparatus}0"), tol)?
        .with_interval(2))
}

/// Measurement of `S_z` for particle `a` during `(t2, t3)`:
/// `Ψ0 ⊙ {z_a^±}⊗{wb_b^±} ⊙ {z_a^±}⊗{wb_b^±} ⊙ {M}⊗{wb_b^±}`.
pub fn family_measure_a(wb: &Direction, tol: f64) -> Result<HistoryFamily> {
    let space = TensorSpace::new([(PARTICLE_A, 2), (APPARATUS_A, 3), (PARTICLE_B, 2)])?;
    let za = Direction::z();
    let spec = spin_measurement(&za, PARTICLE_A, APPARATUS_A, tol)?;
    let u = space.embed(&build_measurement_unitary(&spec, tol)?, &[PARTICLE_A, APPARATUS_A])?;
    let initial =
        space.compose_ket(&[(&[PARTICLE_A, PARTICLE_B], &singlet()), (&[APPARATUS_A], spec.pointer_ready())])?;
    let spins = spin_pair_slot(&space, &za, wb, tol)?;
    let pointer = spec.pointer_decomposition(tol)?.lift(&space, APPARATUS_A)?;
    let b = spin_decomposition(wb, PARTICLE_B, tol)?.lift(&space, PARTICLE_B)?;
    let last = pointer.common_refinement(&b, tol)?;
    let id = Operator::identity(space.dim());
    let dynamics = Dynamics::new(vec![id.clone(), id, u], tol)?;
    HistoryFamily::new(initial, TimeGrid::uniform(4)?, dynamics, vec![spins.clone(), spins, last], tol)
}

/// Both apparatus, `a` measured along `wa` and `b` along `wb`:
/// `Ψ0 ⊙ {wa_a^±}⊗{wb_b^±} ⊙ {wa_a^±}⊗{wb_b^±} ⊙ {M}⊗{N}`.
pub fn family_measure_both_along(wa: &Direction, wb: &Direction, tol: f64) -> Result<HistoryFamily> {
    let space = TensorSpace::new([(PARTICLE_A, 2), (APPARATUS_A, 3), (PARTICLE_B, 2), (APPARATUS_B, 3)])?;
    let spec_a = spin_measurement(wa, PARTICLE_A, APPARATUS_A, tol)?;
    let spec_b = spin_measurement(wb, PARTICLE_B, APPARATUS_B, tol)?;
    let ua = space.embed(&build_measurement_unitary(&spec_a, tol)?, &[PARTICLE_A, APPARATUS_A])?;
    let ub = space.embed(&build_measurement_unitary(&spec_b, tol)?, &[PARTICLE_B, APPARATUS_B])?;
    let initial = space.compose_ket(&[
        (&[PARTICLE_A, PARTICLE_B], &singlet()),
        (&[APPARATUS_A], spec_a.pointer_ready()),
        (&[APPARATUS_B], spec_b.pointer_ready()),
    ])?;
    let spins = spin_pair_slot(&space, wa, wb, tol)?;
    let m = spec_a.pointer_decomposition(tol)?.lift(&space, APPARATUS_A)?;
    let n = spec_b.pointer_decomposition(tol)?.lift(&space, APPARATUS_B)?;
    let last = m.common_refinement(&n, tol)?;
    let id = Operator::identity(space.dim());
    let dynamics = Dynamics::new(vec![id.clone(), id, &ua * &ub], tol)?;
    HistoryFamily::new(initial, TimeGrid::uniform(4)?, dynamics, vec![spins.clone(), spins, last], tol)
}

/// `S_az` measured on `a`, `S_bw` on `b`, with `w` at angle `theta` from
/// `z` in the x-z plane.
pub fn family_measure_both(theta: f64, tol: f64) -> Result<HistoryFamily> {
    family_measure_both_along(&Direction::z(), &Direction::in_xz_plane(theta), tol)
}

/// Entry `(i, j)` is true iff every slot of family `i` is compatible with
/// the corresponding slot of family `j`.
pub fn incompatibility_matrix(families: &[HistoryFamily], tol: f64) -> Result<Vec<Vec<bool>>> {
    if let Some(first) = families.first() {
        for f in families {
            if f.grid() != first.grid() {
                return Err(Error::GridMismatch(format!("grid {:?} vs {:?}", f.grid().times(), first.grid().times())));
            }
        }
    }
    families.iter().map(|f| families.iter().map(|g| f.compatible_with(g, tol)).collect()).collect()
}

/// Joint distribution of the two pointers at `t3`, labels `M±∧N±` and
/// those involving a ready state.
pub fn outcome_table(wa: &Direction, wb: &Direction, tol: f64) -> Result<ProbabilityTable> {
    let family = family_measure_both_along(wa, wb, tol)?;
    probabilities(&family, tol)?.marginal(&[Keep::time(3)])
}

/// `E = Pr(same signs) − Pr(opposite signs)` for pointer outcomes.
pub fn correlation_along(wa: &Direction, wb: &Direction, tol: f64) -> Result<f64> {
    let table = outcome_table(wa, wb, tol)?;
    let mut e = 0.0;
    for sa in [Sign::Plus, Sign::Minus] {
        for sb in [Sign::Plus, Sign::Minus] {
            let label = format!("{APPARATUS_A}{}∧{APPARATUS_B}{}", sa.symbol(), sb.symbol());
            e += sa.value() * sb.value() * table.get(&[label]).unwrap_or(0.0);
        }
    }
    Ok(e)
}

/// Correlation for `S_az` against `S_bw`, `w` at `theta` in the x-z plane.
pub fn correlation(theta: f64, tol: f64) -> Result<f64> {
    correlation_along(&Direction::z(), &Direction::in_xz_plane(theta), tol)
}

/// `S = E(a1,b1) + E(a1,b2) + E(a2,b1) − E(a2,b2)`.
pub fn chsh(a1: &Direction, a2: &Direction, b1: &Direction, b2: &Direction, tol: f64) -> Result<f64> {
    Ok(correlation_along(a1, b1, tol)? + correlation_along(a1, b2, tol)? + correlation_along(a2, b1, tol)?
        - correlation_along(a2, b2, tol)?)
}
