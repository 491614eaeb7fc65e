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

//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fail.

use std::f64::consts::{PI, SQRT_2};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use chronicle::run;
use chronicle_core::epr::{
    chsh, family_measure_a, family_measure_both, family_measure_both_along, family_no_measurement, singlet, spin_ket,
    spin_label, spin_projector, Direction, Sign,
};
use chronicle_core::framework::{check_distributivity, Projector};
use chronicle_core::histories::{born_rule, pre_probability_pair};
use chronicle_core::linalg::span_projector;
use chronicle_core::measurement::{
    collapse, measurement_family, nondestructive_family, textbook_family, MeasurementSpec,
};
use chronicle_core::random::{random_basis, random_decomposition, random_ket, random_unitary};
use chronicle_core::{
    check_consistency, probabilities, Complex, Dynamics, Event, HistoryFamily, Keep, Ket, TensorSpace, TimeGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;
const THETAS: [f64; 6] = [0.0, PI / 6.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0, PI];
const SIGNS: [Sign; 2] = [Sign::Plus, Sign::Minus];

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || format!("{what}: got {got:.17e}, want {want:.17e}"))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn a(d: &Direction, s: Sign) -> String {
    spin_label(d, "a", s)
}

fn b(d: &Direction, s: Sign) -> String {
    spin_label(d, "b", s)
}

fn and(x: &str, y: &str) -> String {
    format!("{x}∧{y}")
}

fn ptr(name: &str, s: Sign) -> String {
    format!("{name}{}", s.symbol())
}

fn half_sin2(theta: f64) -> f64 {
    (theta / 2.0).sin().powi(2)
}

/// `|⟨u|v⟩|²` summed by hand.
fn overlap_sqr(u: &[Complex], v: &[Complex]) -> f64 {
    u.iter().zip(v).map(|(x, y)| x.conj() * y).sum::<Complex>().norm_sqr()
}

fn singlet_z_table() -> Verdict {
    let z = Direction::z();
    let table = probabilities(&family_no_measurement(&z, &z, TOL).map_err(err)?, TOL).map_err(err)?;
    ensure(table.len() == 16, || format!("{} histories", table.len()))?;
    let halves: Vec<_> = table.entries().iter().filter(|(_, p)| (p - 0.5).abs() <= TOL).collect();
    let zeros = table.entries().iter().filter(|(_, p)| *p <= TOL).count();
    ensure(halves.len() == 2 && zeros == 14, || format!("{} at 1/2, {zeros} at 0", halves.len()))?;
    let up = and(&a(&z, Sign::Plus), &b(&z, Sign::Minus));
    let down = and(&a(&z, Sign::Minus), &b(&z, Sign::Plus));
    ensure(halves[0].0.labels() == [up.clone(), up] && halves[1].0.labels() == [down.clone(), down], || {
        format!("unexpected support {} / {}", halves[0].0, halves[1].0)
    })?;
    Ok("2 histories at 1/2, 14 at 0".into())
}

fn singlet_marginals() -> Verdict {
    let z = Direction::z();
    let family = family_no_measurement(&z, &z, TOL).map_err(err)?;
    let marginal = probabilities(&family, TOL).map_err(err)?.marginal(&[Keep::time(2)]).map_err(err)?;
    let born = born_rule(family.initial(), &family.dynamics().propagator(0, 2), &family.slots()[1]).map_err(err)?;
    let psi = singlet();
    let mut n = 0;
    for (i, sa) in SIGNS.iter().enumerate() {
        for (j, sb) in SIGNS.iter().enumerate() {
            let label = and(&a(&z, *sa), &b(&z, *sb));
            let m = marginal.get(std::slice::from_ref(&label)).ok_or_else(|| format!("no marginal for {label}"))?;
            let oracle = psi.amplitudes()[2 * i + j].norm_sqr();
            let engine = born.get(std::slice::from_ref(&label)).ok_or_else(|| format!("no Born entry for {label}"))?;
            close(&label, m, oracle, TOL)?;
            close(&label, m, engine, TOL)?;
            if sa != sb {
                close(&label, m, 0.5, TOL)?;
            }
            n += 1;
        }
    }
    Ok(format!("{n} entries equal the Born rule, opposite signs at 1/2"))
}

fn z_w_table() -> Verdict {
    let z = Direction::z();
    for theta in THETAS {
        let w = Direction::in_xz_plane(theta);
        let table = probabilities(&family_no_measurement(&z, &w, TOL).map_err(err)?, TOL).map_err(err)?;
        for sa in SIGNS {
            for sb in SIGNS {
                let l = and(&a(&z, sa), &b(&w, sb));
                let want = if sa == sb { 0.5 * half_sin2(theta) } else { 0.5 * (theta / 2.0).cos().powi(2) };
                let got = table.get(&[l.clone(), l.clone()]).ok_or_else(|| format!("no history {l}"))?;
                close(&format!("θ = {theta}, {l}"), got, want, TOL)?;
            }
        }
    }
    Ok(format!("{} angles", THETAS.len()))
}

fn random_coefficients(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex> {
    random_ket(rng, n).amplitudes().to_vec()
}

fn measurement_formulas() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let grid = TimeGrid::uniform(3).map_err(err)?;
    let mut count = 0;
    for trial in 0..100 {
        let n = 2 + trial % 3;
        let c = random_coefficients(&mut rng, n);
        let spec = MeasurementSpec::standard(n, TOL).map_err(err)?;
        let joint = probabilities(&measurement_family(&spec, &c, &grid, TOL).map_err(err)?, TOL).map_err(err)?;
        let triple = probabilities(&nondestructive_family(&spec, &c, &grid, TOL).map_err(err)?, TOL).map_err(err)?;
        for j in 1..=n {
            let s_j = format!("s{j}");
            for k in 1..=n {
                let m_k = format!("M{k}");
                let want = if j == k { c[j - 1].norm_sqr() } else { 0.0 };
                let got = joint.get(&[s_j.clone(), m_k.clone()]).ok_or("missing joint entry")?;
                close(&format!("trial {trial}: s{j}, M{k}"), got, want, TOL)?;
                for l in 1..=n {
                    let want = if j == k && k == l { c[j - 1].norm_sqr() } else { 0.0 };
                    let got = triple.get(&[s_j.clone(), and(&format!("s{l}"), &m_k)]).ok_or("missing triple entry")?;
                    close(&format!("trial {trial}: s{j}, M{k}, s{l}"), got, want, TOL)?;
                }
            }
        }
        count += 1;
    }
    Ok(format!("{count} coefficient sets, n = 2, 3, 4"))
}

fn measured_a_conditionals() -> Verdict {
    let z = Direction::z();
    let table = probabilities(&family_measure_a(&z, TOL).map_err(err)?, TOL).map_err(err)?;
    let given = Event::at(3, "M+");
    for j in 1..=2 {
        close(&format!("z_a+ at t{j}"), table.conditional(&given, &Event::at(j, "z_a+"), TOL).map_err(err)?, 1.0, TOL)?;
    }
    for k in 1..=3 {
        close(&format!("z_b- at t{k}"), table.conditional(&given, &Event::at(k, "z_b-"), TOL).map_err(err)?, 1.0, TOL)?;
    }
    let support: Vec<_> = table.entries().iter().filter(|(_, p)| *p > TOL).collect();
    ensure(support.len() == 2, || format!("{} histories with weight", support.len()))?;
    for (h, p) in support {
        close(&h.to_string(), *p, 0.5, TOL)?;
    }
    Ok("two histories at 1/2, j = 1, 2 and k = 1, 2, 3".into())
}

/// Hand-computed collapse: project the singlet amplitudes onto `z_a^s`,
/// renormalize and take the weight of `w_b^t` on the remaining b factor.
fn collapse_oracle(w: &Direction, a_sign: Sign, b_sign: Sign) -> f64 {
    let psi = singlet();
    let row = if a_sign == Sign::Plus { 0 } else { 1 };
    let b_part = [psi.amplitudes()[2 * row], psi.amplitudes()[2 * row + 1]];
    let norm = b_part.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let b_state = [b_part[0] / norm, b_part[1] / norm];
    overlap_sqr(spin_ket(w, b_sign).amplitudes(), &b_state)
}

fn collapse_rule() -> Verdict {
    let space = TensorSpace::new([("a", 2), ("b", 2)]).map_err(err)?;
    let directions = [Direction::z(), Direction::x(), Direction::new(PI / 5.0, 0.0).map_err(err)?];
    for w in &directions {
        let table = probabilities(&family_measure_a(w, TOL).map_err(err)?, TOL).map_err(err)?;
        for sa in SIGNS {
            let za = spin_projector(&Direction::z(), sa).lift(&space, "a").map_err(err)?;
            let state = collapse(&singlet(), &za, TOL).map_err(err)?;
            for sb in SIGNS {
                let wb = spin_projector(w, sb).lift(&space, "b").map_err(err)?;
                let engine = state.inner(&wb.op().apply(&state).map_err(err)?).map_err(err)?.re;
                let oracle = collapse_oracle(w, sa, sb);
                close("collapse vs oracle", engine, oracle, TOL)?;
                for k in 1..=3 {
                    let family =
                        table.conditional(&Event::at(3, &ptr("M", sa)), &Event::at(k, &b(w, sb)), TOL).map_err(err)?;
                    close(&format!("{} at t{k} given {}", b(w, sb), ptr("M", sa)), family, engine, TOL)?;
                }
            }
        }
    }
    Ok("w_b in {z, x, θ = π/5}, both outcomes, t1..t3".into())
}

fn measured_a_w() -> Verdict {
    for theta in THETAS {
        let w = Direction::in_xz_plane(theta);
        let table = probabilities(&family_measure_a(&w, TOL).map_err(err)?, TOL).map_err(err)?;
        for k in 1..=3 {
            let p = table.conditional(&Event::at(3, "M+"), &Event::at(k, &b(&w, Sign::Plus)), TOL).map_err(err)?;
            close(&format!("θ = {theta}, k = {k}"), p, half_sin2(theta), TOL)?;
            for s in SIGNS {
                let l = b(&w, s);
                let p = table.conditional(&Event::at(1, &l), &Event::at(k, &l), TOL).map_err(err)?;
                close(&format!("θ = {theta}, {l} persists to t{k}"), p, 1.0, TOL)?;
            }
        }
    }
    Ok(format!("{} angles, k = 1, 2, 3", THETAS.len()))
}

fn both_measured() -> Verdict {
    let z = Direction::z();
    for theta in THETAS {
        let w = Direction::in_xz_plane(theta);
        let table = probabilities(&family_measure_both(theta, TOL).map_err(err)?, TOL).map_err(err)?;
        for s in SIGNS {
            for j in 1..=2 {
                let p = table.conditional(&Event::at(3, &ptr("M", s)), &Event::at(j, &a(&z, s)), TOL).map_err(err)?;
                close(&format!("θ = {theta}: a at t{j}"), p, 1.0, TOL)?;
                let p = table.conditional(&Event::at(3, &ptr("N", s)), &Event::at(j, &b(&w, s)), TOL).map_err(err)?;
                close(&format!("θ = {theta}: b at t{j}"), p, 1.0, TOL)?;
            }
            let p = table.conditional(&Event::at(3, &ptr("M", s)), &Event::at(3, &ptr("N", s)), TOL).map_err(err)?;
            close(&format!("θ = {theta}: N given M"), p, half_sin2(theta), TOL)?;
        }
    }
    Ok(format!("{} angles", THETAS.len()))
}

fn locality() -> Verdict {
    let mut directions = Vec::new();
    for theta in [0.3, 1.1, 1.9, 2.7] {
        for phi in [0.0, 2.1, 4.2] {
            directions.push(Direction::new(theta, phi).map_err(err)?);
        }
    }
    let mut worst: f64 = 0.0;
    for w in &directions {
        let names = [b(w, Sign::Plus), b(w, Sign::Minus)];
        let among = [names[0].as_str(), names[1].as_str()];
        let keep = [Keep::component(1, &among), Keep::component(2, &among)];
        let without = probabilities(&family_no_measurement(&Direction::z(), w, TOL).map_err(err)?, TOL)
            .map_err(err)?
            .marginal(&keep)
            .map_err(err)?;
        let with_table = probabilities(&family_measure_a(w, TOL).map_err(err)?, TOL).map_err(err)?;
        let with = with_table.marginal(&keep).map_err(err)?;
        worst = worst.max(without.total_variation(&with));
        let last = with_table.marginal(&[Keep::component(3, &among)]).map_err(err)?;
        let before = without.marginal(&[Keep::time(2)]).map_err(err)?;
        for (index, p) in last.entries() {
            let q = before.get(index.labels()).ok_or_else(|| format!("no {index} before the measurement"))?;
            worst = worst.max((p - q).abs());
        }
    }
    ensure(worst <= TOL, || format!("total variation {worst:e}"))?;
    Ok(format!("{} directions, worst distance {worst:.1e}", directions.len()))
}

fn distributivity() -> Verdict {
    let z_plus = spin_projector(&Direction::z(), Sign::Plus);
    let x_plus = spin_projector(&Direction::x(), Sign::Plus);
    let x_minus = spin_projector(&Direction::x(), Sign::Minus);
    let report = check_distributivity(&z_plus, &x_plus, &x_minus, TOL);
    ensure(report.lhs.op().max_abs() <= TOL, || "lhs is not the zero projector".into())?;
    ensure(report.rhs.op().approx_eq(z_plus.op(), TOL), || "rhs is not z+".into())?;
    ensure(!report.equal, || "inequality not detected".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..100 {
        let dim = rng.random_range(2..=5);
        let basis = random_basis(&mut rng, dim);
        let subsets: Vec<Vec<bool>> = (0..3).map(|_| (0..dim).map(|_| rng.random_bool(0.5)).collect()).collect();
        let projector = |mask: &[bool]| -> Result<Projector, String> {
            let kets: Vec<Ket> = basis.iter().zip(mask).filter(|(_, m)| **m).map(|(k, _)| k.clone()).collect();
            Projector::new(span_projector(&kets, dim), "p", TOL).map_err(err)
        };
        let [p, q, r] = [projector(&subsets[0])?, projector(&subsets[1])?, projector(&subsets[2])?];
        let report = check_distributivity(&p, &q, &r, TOL);
        let expected: Vec<bool> = (0..dim).map(|i| subsets[0][i] && (subsets[1][i] || subsets[2][i])).collect();
        let oracle = projector(&expected)?;
        ensure(report.equal, || format!("trial {trial}: commuting triple reported non-distributive"))?;
        ensure(report.lhs.op().approx_eq(oracle.op(), 1e-9), || {
            format!("trial {trial}: lhs differs from the set oracle")
        })?;
    }
    Ok("z+, x+, x- breaks the law; 100 commuting triples obey it".into())
}

fn consistency() -> Verdict {
    let scenarios = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut bundled = 0;
    let mut paths: Vec<_> = std::fs::read_dir(&scenarios)
        .map_err(err)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    paths.sort();
    for path in paths {
        let report = run(&path, TOL).map_err(|e| format!("{}: {e}", path.display()))?;
        for f in &report.families {
            ensure(f.consistency.consistent && f.consistency.worst_overlap <= TOL, || {
                format!("{}: {} overlaps by {:e}", path.display(), f.name, f.consistency.worst_overlap)
            })?;
            bundled += 1;
        }
    }
    let w = Direction::in_xz_plane(PI / 3.0);
    let z = Direction::z();
    let prebuilt = [
        family_no_measurement(&z, &z, TOL),
        family_no_measurement(&w, &w, TOL),
        family_no_measurement(&z, &w, TOL),
        family_measure_a(&z, TOL),
        family_measure_a(&w, TOL),
        family_measure_both_along(&z, &w, TOL),
    ];
    for f in prebuilt {
        let report = check_consistency(&f.map_err(err)?, TOL);
        ensure(report.consistent, || format!("prebuilt family overlaps by {:e}", report.worst_overlap))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for trial in 0..50 {
        let dim = rng.random_range(2..=6);
        let parts = rng.random_range(1..=dim);
        let family = HistoryFamily::new(
            random_ket(&mut rng, dim),
            TimeGrid::uniform(2).map_err(err)?,
            Dynamics::new(vec![random_unitary(&mut rng, dim)], TOL).map_err(err)?,
            vec![random_decomposition(&mut rng, dim, parts)],
            TOL,
        )
        .map_err(err)?;
        let report = check_consistency(&family, TOL);
        ensure(report.consistent, || format!("random two-time family {trial} overlaps by {:e}", report.worst_overlap))?;
    }

    let grid = TimeGrid::uniform(3).map_err(err)?;
    let mut flagged = 0;
    for trial in 0..30 {
        let n = 2 + trial % 3;
        let mut c = random_coefficients(&mut rng, n);
        let nonzero = 1 + trial % n;
        for entry in c.iter_mut().skip(nonzero) {
            *entry = Complex::new(0.0, 0.0);
        }
        let norm = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        c.iter_mut().for_each(|x| *x /= norm);
        let spec = MeasurementSpec::standard(n, TOL).map_err(err)?;
        let textbook = textbook_family(&spec, &c, &grid, TOL).map_err(err)?;
        let plain = measurement_family(&spec, &c, &grid, TOL).map_err(err)?;
        let report = check_consistency(&textbook, TOL);
        ensure(report.consistent, || format!("textbook family {trial} overlaps by {:e}", report.worst_overlap))?;
        let compatible = textbook.compatible_with(&plain, TOL).map_err(err)?;
        ensure(compatible == (nonzero < 2), || format!("trial {trial}: {nonzero} nonzero, compatible = {compatible}"))?;
        if !compatible {
            flagged += 1;
        }
    }
    Ok(format!(
        "{bundled} bundled and 6 prebuilt families, 50 random two-time families, {flagged} textbook families flagged"
    ))
}

fn pre_probability() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let dim = rng.random_range(2..=6);
        let initial = random_ket(&mut rng, dim);
        let u = random_unitary(&mut rng, dim);
        let target = random_ket(&mut rng, dim);
        let (forward, backward) = pre_probability_pair(&initial, &u, &target).map_err(err)?;
        let evolved: Vec<Complex> =
            (0..dim).map(|i| (0..dim).map(|j| u.get(i, j) * initial.amplitudes()[j]).sum()).collect();
        let oracle = overlap_sqr(target.amplitudes(), &evolved);
        ensure((forward - backward).abs() <= 1e-12, || format!("trial {trial}: {forward} vs {backward}"))?;
        close(&format!("trial {trial}"), forward, oracle, 1e-12)?;
        worst = worst.max((forward - backward).abs());
    }
    Ok(format!("100 random pairs, worst difference {worst:.1e}"))
}

fn chsh_demo() -> Verdict {
    let a1 = Direction::z();
    let a2 = Direction::x();
    let b1 = Direction::in_xz_plane(PI / 4.0);
    let b2 = Direction::in_xz_plane(-PI / 4.0);
    let s = chsh(&a1, &a2, &b1, &b2, TOL).map_err(err)?;
    close("|S|", s.abs(), 2.0 * SQRT_2, 1e-9)?;
    let mut classical: f64 = 0.0;
    for bits in 0..16u32 {
        let v = |i: u32| -> f64 {
            if bits >> i & 1 == 1 {
                1.0
            } else {
                -1.0
            }
        };
        let (x1, x2, y1, y2) = (v(0), v(1), v(2), v(3));
        classical = classical.max((x1 * y1 + x1 * y2 + x2 * y1 - x2 * y2).abs());
    }
    ensure(classical <= 2.0, || format!("deterministic bound {classical}"))?;
    Ok(format!("S = {s:.12}, deterministic assignments reach {classical}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("singlet z-z table", singlet_z_table),
        ("singlet marginals equal the Born rule", singlet_marginals),
        ("singlet z-w table across the angle grid", z_w_table),
        ("measurement joint and nondestructive formulas", measurement_formulas),
        ("a-side measurement conditionals", measured_a_conditionals),
        ("collapse rule equals family conditionals", collapse_rule),
        ("b-side conditionals and persistence", measured_a_w),
        ("both-apparatus conditionals across the angle grid", both_measured),
        ("locality of b-side statistics", locality),
        ("distributive law", distributivity),
        ("consistency guarantees", consistency),
        ("pre-probability equivalence", pre_probability),
        ("CHSH demonstration", chsh_demo),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} criteria, {failed} failed, {:.2}s", criteria.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
