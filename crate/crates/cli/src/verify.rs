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

//! The built-in regression suite behind `verify-paper`.

use std::f64::consts::PI;

use chronicle_core::epr::{
    family_measure_a, family_measure_both, family_no_measurement, incompatibility_matrix, singlet, spin_label,
    spin_projector, Direction, Sign, APPARATUS_A, APPARATUS_B, PARTICLE_A, PARTICLE_B,
};
use chronicle_core::framework::check_distributivity;
use chronicle_core::histories::{born_rule, pre_probability_pair};
use chronicle_core::measurement::{
    collapse, measurement_family, nondestructive_family, textbook_family, MeasurementSpec,
};
use chronicle_core::random::{random_ket, random_unitary};
use chronicle_core::{probabilities, Complex, Event, Keep, ProbabilityTable, TensorSpace, TimeGrid};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::report::{render_columns, EngineInfo};

/// The default angle grid for checks that depend on `theta`.
pub const THETA_GRID: [f64; 6] = [0.0, PI / 6.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0, PI];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub description: String,
    pub deviation: Option<f64>,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub engine: EngineInfo,
    pub tolerance: f64,
    pub theta: Option<f64>,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub only: Option<String>,
    pub theta: Option<f64>,
    pub tol: f64,
}

struct Ctx {
    tol: f64,
    thetas: Vec<f64>,
}

/// What a check measured: the largest numeric deviation from the expected
/// values, plus any structural expectation that failed.
struct Outcome {
    deviation: f64,
    failures: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new(detail: impl Into<String>) -> Self {
        Outcome { deviation: 0.0, failures: Vec::new(), detail: detail.into() }
    }

    fn compare(&mut self, computed: f64, expected: f64) {
        let d = (computed - expected).abs();
        self.deviation = if d.is_nan() { f64::INFINITY } else { self.deviation.max(d) };
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

type CheckFn = fn(&Ctx) -> chronicle_core::Result<Outcome>;

struct Check {
    name: &'static str,
    description: &'static str,
    run: CheckFn,
}

const CHECKS: &[Check] = &[
    Check { name: "eq2", description: "distributive law fails for z+, x+, x-", run: distributivity },
    Check { name: "eq17", description: "measurement family: Pr(s_j, M_k) = |c_j|^2 δ_jk", run: measurement_joint },
    Check { name: "eq18", description: "measurement family: Pr(s_j | M_k) = δ_jk", run: measurement_retrodiction },
    Check {
        name: "eq19",
        description: "nondestructive family: Pr(s_j, M_k, s_l) = |c_j|^2 δ_jk δ_kl",
        run: nondestructive,
    },
    Check { name: "eq24", description: "singlet, z on both sides: two histories at 1/2", run: singlet_z_table },
    Check { name: "eq25", description: "singlet marginals at t2 equal the Born rule", run: singlet_marginals },
    Check {
        name: "eq28", description: "z on a, w on b: (1/2)cos^2(θ/2) and (1/2)sin^2(θ/2)", run: singlet_z_w_table
    },
    Check { name: "eq32", description: "a measured along z: two histories at 1/2", run: measured_a_table },
    Check { name: "eq33", description: "Pr(z_a+ | M+) = Pr(z_b- | M+) = 1", run: measured_a_conditionals },
    Check { name: "eq35", description: "collapsed state gives Pr(z_b- | M+) = 1", run: collapse_z },
    Check { name: "eq37", description: "Pr(w_b+ | M+) = sin^2(θ/2) at t1, t2, t3", run: measured_a_w },
    Check { name: "eq38", description: "Pr(w_bk± | w_b1±) = 1 for k = 1, 2, 3", run: persistence },
    Check { name: "eq41", description: "both measured: Pr(z_aj± | M±) = 1", run: both_a_side },
    Check { name: "eq42", description: "both measured: Pr(w_bj± | N±) = 1", run: both_b_side },
    Check { name: "eq43", description: "both measured: Pr(N± | M±) = sin^2(θ/2)", run: both_outcomes },
    Check { name: "incompat", description: "family compatibility relations", run: incompatibilities },
    Check { name: "collapse", description: "collapse rule equals family conditionals", run: collapse_equivalence },
    Check { name: "preprob", description: "forward and backward pre-probabilities agree", run: pre_probabilities },
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

/// Runs every check, or the one named in `options.only`. Returns `None`
/// when that name is unknown.
pub fn verify(options: &VerifyOptions) -> Option<VerifyReport> {
    let selected: Vec<&Check> = match &options.only {
        None => CHECKS.iter().collect(),
        Some(name) => vec![CHECKS.iter().find(|c| c.name == name)?],
    };
    let ctx = Ctx { tol: options.tol, thetas: options.theta.map_or_else(|| THETA_GRID.to_vec(), |t| vec![t]) };
    let checks: Vec<CheckResult> = selected
        .into_iter()
        .map(|c| match (c.run)(&ctx) {
            Ok(o) => {
                let passed = o.failures.is_empty() && o.deviation <= ctx.tol;
                let detail =
                    if o.failures.is_empty() { o.detail } else { format!("{}; {}", o.detail, o.failures.join("; ")) };
                CheckResult {
                    name: c.name.into(),
                    description: c.description.into(),
                    deviation: Some(o.deviation),
                    passed,
                    detail,
                }
            }
            Err(e) => CheckResult {
                name: c.name.into(),
                description: c.description.into(),
                deviation: None,
                passed: false,
                detail: format!("error: {e}"),
            },
        })
        .collect();
    let passed = checks.iter().all(|c| c.passed);
    Some(VerifyReport { engine: EngineInfo::current(), tolerance: options.tol, theta: options.theta, checks, passed })
}

pub fn render_verify(report: &VerifyReport) -> String {
    let headers: Vec<String> = ["status", "check", "deviation", "description", "detail"].map(String::from).to_vec();
    let rows: Vec<Vec<String>> = report
        .checks
        .iter()
        .map(|c| {
            vec![
                if c.passed { "PASS" } else { "FAIL" }.to_string(),
                c.name.clone(),
                c.deviation.map_or_else(|| "-".to_string(), |d| format!("{d:.3e}")),
                c.description.clone(),
                c.detail.clone(),
            ]
        })
        .collect();
    let mut out = render_columns(&headers, &rows);
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    out.push_str(&format!("{} checks, {} failed, tolerance {:e}\n", report.checks.len(), failed, report.tolerance));
    out
}

fn angles(ctx: &Ctx) -> String {
    match ctx.thetas.as_slice() {
        [theta] => format!("θ = {theta}"),
        all => format!("{} angles", all.len()),
    }
}

fn a_label(d: &Direction, s: Sign) -> String {
    spin_label(d, PARTICLE_A, s)
}

fn b_label(d: &Direction, s: Sign) -> String {
    spin_label(d, PARTICLE_B, s)
}

fn pair(a: &str, b: &str) -> String {
    format!("{a}∧{b}")
}

fn pointer(apparatus: &str, s: Sign) -> String {
    format!("{apparatus}{}", s.symbol())
}

const SIGNS: [Sign; 2] = [Sign::Plus, Sign::Minus];

fn distributivity(ctx: &Ctx) -> chronicle_core::Result<Outcome> {
    let p = spin_projector(&Direction::z(), Sign::Plus);
    let q = spin_projector(&Direction::x(), Sign::Plus);
    let r = spin_projector(&Direction::x(), Sign::Minus);
    let report = check_distributivity(&p, &q, &r, ctx.tol);
    let mut o = Outcome::new("(P∧Q)∨(P∧R) = 0 while P∧(Q∨R) = P");
    o.deviation = report.lhs.op().max_abs().max(report.rhs.op().max_abs_diff(p.op()));
    o.expect(!report.equal, || "the two sides compare equal".into());
    Ok(o)
}

fn coefficient_sets() -> Vec<Vec<Complex>> {
    let h = 0.5;
    let t = 1.0 / 3f64.sqrt();
    vec![
        vec![Complex::new(0.6, 0.0), Complex::new(0.0, 0.8)],
        vec![Complex::new(t, 0.0), Complex::new(0.0, t), Complex::new(-t, 0.0)],
        vec![Complex::new(h, 0.0), Complex::new(0.0, h), Complex::new(-h, 0.0), Complex::new(0.0, -h)],
        vec![Complex::new(0.0, 1.0), Complex::new(0.0, 0.0)],
    ]
}

fn measurement_table(c: &[Complex], ctx: &Ctx, nondestructive: bool) -> chronicle_core::Result<ProbabilityTable> {
    let spec = MeasurementSpec::standard(c.len(), ctx.tol)?;
    let grid = TimeGrid::uniform(3)?;
    let family = if nondestructive {
        nondestructive_family(&spec, c, &grid, ctx.tol)?
    } else {
        measurement_family(&spec, c, &grid, ctx.tol)?
    };
    probabilities(&family, ctx.tol)
}

fn measurement_joint(ctx: &Ctx) -> chronicle_core::Result<Outcome> {
    let mut o = Outcome::new("coefficient sets with n = 2, 3, 4");
    for c in coefficient_sets() {
        let table = measurement_table(&c, ctx, false)?;
        for j in 1..=c.len() {
            for k in 1..=c.len() {
                let p = table.get(&[format!("s{j}"), format!("M{k}")]);
                o.expect(p.is_some(), || format!("missing history s{j}, M{k}"));
                let expected = if j == k { c[j - 1].norm_sqr() } else { 0.0 };
                o.compare(p.unwrap_or(f64::NAN), expected);
            }
        }
    }
    Ok(o)
}

fn measurement_retrodiction(ctx: &Ctx) -> chronicle_core::Result<Outcome> {
    let mut o = Outcome::new("every outcome with nonzero weight");
    for c in coefficient_sets() {
        let table = measurement_table(&c, ctx, false)?;
        for k in 1..=c.len() {
            if c[k - 1].norm_sqr() == 0.0 {
                continue;
            }
            for j in 1..=c.len() {
                let p = table.conditional(&Event::at(2, &format!("M{k}")), &Event::at(1, &format!("s{j}")), ctx.tol)?;
                o.compare(p, if j == k { 1.0 } else { 0.0 });
            }
        }
    }
    Ok(o)
}

fn nondestructive(ctx: &Ctx) -> chronicle_core::Result<Outcome> {
    let mut o = Outcome::new("coefficient sets with n = 2, 3, 4");
    for c in coefficient_sets() {
        let table = measurement_table(&c, ctx, true)?;
        let n = c.len();
        for j in 1..=n {
            for k in 1..=n {
                for l in 1..=n {
                    let p = table.get(&[format!("s{j}"), pair(&format!("s{l}"), &format!("M{k}"))]);
                    o.expect(p.is_some(), || format!("missing history s{j}, s{l}∧M{k}"));
                    let expected = if j == k && k == l { c[j - 1].norm_sqr() } else { 0.0 };
                    o.compare(p.unwrap_or(f64::NAN), expected);
                }
            }
        }
    }
    Ok(o)
}

fn singlet_z_table(ctx: &Ctx) -> chronicle_core::Result<Outcome> {
    let z = Direction::z();
    let table = probabilities(&family_no_measurement(&z, &z, ctx.tol)?, ctx.tol)?;
    let up = pair(&a_label(&z, Sign::Plus), &b_label(&z, Sign::Minus));
    let down = pair(&a_label(&z, Sign::Minus), &b_label(&z, Sign::Plus));
    let mut o = Outcome::new(format!("{} histories", table.len()));
    o.expect(table.len() == 16, || format!("expected 16 histories, found {}", table.len()));
    for (index, p) in table.entries() {
        let l = index.labels();
        let half = (l[0] == up && l[1] == up) || (l[0] == down && l[1] == down);
        o.compare(*p, if half { 0.5 } else { 0.0 });
    }
    Ok(o)
}

fn singlet_marginals(ctx: &Ctx) -> chronicle_core::Result<Outcome> {
    let z = Direction::z();
    let family = family_no_measurement(&z, &z, ctx.tol)?;
    let marginal = probabilities(&family, ctx.tol)?.marginal(&[Keep::time(2)])?;
    let born = born_rule(family.initial(), &family.dynamics().propagator(0, 2), &family.slots()[1])?;
    let mut o = Outcome::new("marginal at t2 against the Born rule");
    for (index, p) in born.entries() {
        let m = marginal.get(index.labels());
        o.expect(m.is_some(), || format!("marginal lacks {index}"));
        o.compare(m.unwrap_or(f64::NAN), *p);
    }
    for (a, b) in [(Sign::Plus, Sign::Minus), (Sign::Minus, Sign::Plus)] {
        let label = pair(&a_label(&z, a), &b_label(&z, b));
        o.compare(marginal.get(&[label]).unwrap_or(f64::NAN), 0.5);
    }
    Ok(o)
}

fn singlet_z_w_table(ctx: &Ctx) -> chronicle_core::Result<Outcome> {
    let z = Direction::z();
    let mut o = Outcome::new(angles(ctx));
    for &theta in &ctx.thetas {
        let w = Direction::in_xz_plane(theta);
        let table = probabilities(&family_no_measurement(&z, &w, ctx.tol)?, ctx.tol)?;
        let c2 = 0.5 * (theta / 2.0).cos().powi(2);
        let s2 = 0.5 * (theta / 2.0).sin().powi(2);
        for sa in SIGNS {
            for sb in SIGNS {
                let l = pair(&a_label(&z, sa), &b_label(&w, sb));
                let expected = if sa == sb { s2 } else { c2 };
                o.compare(table.get(&[l.clone(), l]).unwrap_or(f64::NAN), expected);
            }
        }
    }
    Ok(o)
}

fn measured_a_table(ctx: &Ctx) -> chronicle_core::Result<Outcome> {
    let z = Direction::z();
    let table = probabilities(&family_measure_a(&z, ctx.tol)?, ctx.tol)?;
    let mut o = Outcome::new(format!("{} histories", table.len()));
    let expected: Vec<[String; 3]> = [(Sign::Plus, Sign::Minus), (Sign::Minus, Sign::Plus)]
        .iter()
        .map(|&(a, b)| {
            let s = pair(&a_label(&z, a), &b_label(&z, b));
            [s.clone(), s, pair(&pointer(APPARATUS_A, a), &b_label(&z, b))]
        })
        .collect();
    for (index, p) in table.entries() {
        let half = expected.iter().any(|e| e.as_slice() == index.labels());
        o.compare(*p, if half { 0.5 } else { 0.0 });
    }
    Ok(o)
}

fn measured_a_conditionals(ctx: &Ctx) -> chronicle_core::Result<Outcome> {
    let z = Direction::z();
    let table = probabilities(&family_measure_a(&z, ctx.tol)?, ctx.tol)?;
    let given = Event::at(3, &pointer(APPARATUS_A, Sign::Plus));
    let mut o = Outcome::new("j = 1, 2 and k = 1, 2, 3");
    for j in 1..=2 {
        o.compare(table.conditional(&given, &Event::at(j, &a_label(&z, Sign::Plus)), ctx.tol)?, 1.0);
    }
    for k in 1..=3 {
        o.compare(table.conditional(&given, &Event::at(k, &b_label(&z, Sign::Minus)), ctx.tol)?, 1.0);
    }
    Ok(o)
}

fn collapsed_b_probability(w: &Direction, a_sign: Sign, b_sign: Sign, tol: f64) -> chronicle_core::Result<f64> {
    let space = TensorSpace::new([(PARTICLE_A, 2), (PARTICLE_B, 2)])?;
    let za = spin_projector(&Direction::z(), a_sign).lift(&space, PARTICLE_A)?;
    let state = collapse(&singlet(), &za, tol)?;
    let wb = spin_projector(w, b_sign).lift(&space, PARTICLE_B)?;
    Ok(state.inner(&wb.op().apply(&state)?)?.re)
}

fn collapse_z(ctx: &Ctx) -> chronicle_core::Result<Outcome> {
    let z = Direction::z();
    let table = probabilities(&family_measure_a(&z, ctx.tol)?, ctx.tol)?;
    let via_collapse = collapsed_b_probability(&z, Sign::Plus, Sign::Minus, ctx.tol)?;
    let via_family = table.conditional(
        &Event::at(3, &pointer(APPARATUS_A, Sign::Plus)),
        &Event::at(3, &b_label(&z, Sign::Minus)),
        ctx.tol,
    )?;
    let mut o = Outcome::new(format!("collapse {via_collapse:.12}, family {via_family:.12}"));
    o.compare(via_collapse, 1.0);
    o.compare(via_family, 1.0);
    Ok(o)
}

fn measured_a_w(ctx: &Ctx) -> chronicle_core::Result<Outcome> {
    let mut o = Outcome::new(angles(ctx));
    for &theta in &ctx.thetas {
        let w = Direction::in_xz_plane(theta);
        let table = probabilities(&family_measure_a(&w, ctx.tol)?, ctx.tol)?;
        let given = Event::at(3, &pointer(APPARATUS_A, Sign::Plus));
        for k in 1..=3 {
            let p = table.conditional(&given, &Event::at(k, &b_label(&w, Sign::Plus)), ctx.tol)?;
            o.compare(p, (theta / 2.0).sin().powi(2));
        }
        for j in 1..=2 {
            let p = table.conditional(&given, &Event::at(j, &a_label(&Direction::z(), Sign::Plus)), ctx.tol)?;
            o.compare(p, 1.0);
        }
    }
    Ok(o)
}

fn persistence(ctx: &Ctx) -> chronicle_core::Result<Outcome> {
    let mut o = Outcome::new(angles(ctx));
    for &theta in &ctx.thetas {
        let w = Direction::in_xz_plane(theta);
        let table = probabilities(&family_measure_a(&w, ctx.tol)?, ctx.tol)?;
        for s in SIGNS {
            let l = b_label(&w, s);
            for k in 1..=3 {
                o.compare(table.conditional(&Event::at(1, &l), &Event::at(k, &l), ctx.tol)?, 1.0);
            }
        }
    }
    Ok(o)
}

fn both_a_side(ctx: &Ctx) -> chronicle_core::Result<Outcome> {
    let z = Direction::z();
    let mut o = Outcome::new(angles(ctx));
    for &theta in &ctx.thetas {
        let table = probabilities(&family_measure_both(theta, ctx.tol)?, ctx.tol)?;
        for s in SIGNS {
            let given = Event::at(3, &pointer(APPARATUS_A, s));
            for j in 1..=2 {
                o.compare(table.conditional(&given, &Event::at(j, &a_label(&z, s)), ctx.tol)?, 1.0);
            }
        }
    }
    Ok(o)
}

fn both_b_side(ctx: &Ctx) -> chronicle_core::Result<Outcome> {
    let mut o = Outcome::new(angles(ctx));
    for &theta in &ctx.thetas {
        let w = Direction::in_xz_plane(theta);
        let table = probabilities(&family_measure_both(theta, ctx.tol)?, ctx.tol)?;
        for s in SIGNS {
            let given = Event::at(3, &pointer(APPARATUS_B, s));
            for j in 1..=2 {
                o.compare(table.conditional(&given, &Event::at(j, &b_label(&w, s)), ctx.tol)?, 1.0);
            }
        }
    }
    Ok(o)
}

fn both_outcomes(ctx: &Ctx) -> chronicle_core::Result<Outcome> {
    let mut o = Outcome::new(angles(ctx));
    for &theta in &ctx.thetas {
        let table = probabilities(&family_measure_both(theta, ctx.tol)?, ctx.tol)?;
        for s in SIGNS {
            let p = table.conditional(
                &Event::at(3, &pointer(APPARATUS_A, s)),
                &Event::at(3, &pointer(APPARATUS_B, s)),
                ctx.tol,
            )?;
            o.compare(p, (theta / 2.0).sin().powi(2));
        }
    }
    Ok(o)
}

fn incompatibilities(ctx: &Ctx) -> chronicle_core::Result<Outcome> {
    let z = Direction::z();
    let mut o = Outcome::new(format!("{} and the measurement families", angles(ctx)));
    for &theta in &ctx.thetas {
        let w = Direction::in_xz_plane(theta);
        let families = [
            family_no_measurement(&z, &z, ctx.tol)?,
            family_no_measurement(&w, &w, ctx.tol)?,
            family_no_measurement(&z, &w, ctx.tol)?,
        ];
        let matrix = incompatibility_matrix(&families, ctx.tol)?;
        let aligned = theta.sin().abs() < 1e-12;
        for (i, row) in matrix.iter().enumerate() {
            for (j, &compatible) in row.iter().enumerate() {
                let expected = i == j || aligned;
                o.expect(compatible == expected, || {
                    format!("θ = {theta}: families {i} and {j} compatible = {compatible}")
                });
            }
        }
    }
    let spec = MeasurementSpec::standard(2, ctx.tol)?;
    let grid = TimeGrid::uniform(3)?;
    for (c, expected) in [
        (vec![Complex::new(0.6, 0.0), Complex::new(0.0, 0.8)], false),
        (vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)], true),
    ] {
        let textbook = textbook_family(&spec, &c, &grid, ctx.tol)?;
        let plain = measurement_family(&spec, &c, &grid, ctx.tol)?;
        let compatible = textbook.compatible_with(&plain, ctx.tol)?;
        o.expect(compatible == expected, || format!("textbook family compatible = {compatible} for c = {c:?}"));
        let total = probabilities(&textbook, ctx.tol)?.total();
        o.compare(total, 1.0);
    }
    Ok(o)
}

fn collapse_equivalence(ctx: &Ctx) -> chronicle_core::Result<Outcome> {
    let mut directions = vec![Direction::z(), Direction::x(), Direction::in_xz_plane(PI / 5.0)];
    directions.extend(ctx.thetas.iter().map(|&t| Direction::in_xz_plane(t)));
    let mut o = Outcome::new(format!("{} directions for b", directions.len()));
    for w in &directions {
        let table = probabilities(&family_measure_a(w, ctx.tol)?, ctx.tol)?;
        for a in SIGNS {
            for b in SIGNS {
                let via_collapse = collapsed_b_probability(w, a, b, ctx.tol)?;
                let given = Event::at(3, &pointer(APPARATUS_A, a));
                for k in 1..=3 {
                    let via_family = table.conditional(&given, &Event::at(k, &b_label(w, b)), ctx.tol)?;
                    o.compare(via_family, via_collapse);
                }
            }
        }
    }
    Ok(o)
}

fn pre_probabilities(_: &Ctx) -> chronicle_core::Result<Outcome> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let trials = 100;
    let mut o = Outcome::new(format!("{trials} random states, unitaries and targets"));
    for _ in 0..trials {
        let dim = rng.random_range(2..=6);
        let initial = random_ket(&mut rng, dim);
        let target = random_ket(&mut rng, dim);
        let u = random_unitary(&mut rng, dim);
        let (forward, backward) = pre_probability_pair(&initial, &u, &target)?;
        o.compare(forward, backward);
    }
    Ok(o)
}
