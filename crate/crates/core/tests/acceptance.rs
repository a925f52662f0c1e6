//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines are always printed. The
//! process fails when a criterion outside `KNOWN_FAILURES` fails, or when a
//! known failure starts passing.

mod common;

use std::f64::consts::{PI, TAU};
use std::sync::Arc;
use std::time::Instant;

use common::*;
use nalgebra::{DMatrix, Matrix4, Vector4};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sympoisson::algebroid::{
    anchor_residual, antisymmetry_residual, check_axioms, derived_bracket_check, jacobi_residual,
    killing_via_schouten, leibniz_residual,
};
use sympoisson::exact::{int, rat, RatMatrix};
use sympoisson::expr::Expr;
use sympoisson::geometry::*;
use sympoisson::jj::{catalog, catalog_entry, to_linear_structure, CommutativeAlgebra};
use sympoisson::liealg::{
    coordinate_frame, hopf_matrix, li_catalog, li_is_strong, li_verdicts, su2_flow, weitzenboeck0,
    LeftInvariantSymTensor,
};
use sympoisson::poisson::*;
use sympoisson::pw::*;
use sympoisson::sampling::{check_zero, Sampling};
use sympoisson::structures::{self, PlaneField};

/// Criterion 7 asks for `[X₁,X₃] = ½X₄`; the generators as given bracket
/// to `−3/2·X₄`.
const KNOWN_FAILURES: &[usize] = &[7];

struct Outcome {
    pass: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Outcome {
        Outcome {
            pass: true,
            notes: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.pass = false;
            self.notes.push(format!("failed: {}", what.into()));
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }
}

fn s() -> Sampling {
    Sampling::default()
}

fn holds(v: Result<sympoisson::sampling::Verdict, GeometryError>) -> bool {
    v.expect("verdict evaluates").holds
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let flat = structures::flat(2, 1);
    o.require(holds(is_symmetric_poisson(&flat, &s())), "flat sp");
    o.require(holds(is_strong(&flat, &s())), "flat strong");

    let mut r = rng(0xC1);
    let c = Arc::new(Chart::standard(3));
    for k in 0..3 {
        let zero = structures::zero_with(random_connection(&mut r, &c, 2));
        o.require(
            holds(is_strong(&zero, &s())),
            format!("theta = 0 strong, connection {k}"),
        );
    }

    let inc = structures::inclusion_default();
    o.require(holds(is_symmetric_poisson(&inc, &s())), "inclusion sp");
    o.require(holds(is_strong(&inc, &s())), "inclusion strong");
    o.require(!holds(is_parallel(&inc, &s())), "inclusion not parallel");

    let ndk = structures::non_deg_killing();
    o.require(
        holds(is_killing(&ndk.nabla, &ndk.metric, &s())),
        "non-deg-Kill Killing",
    );
    o.require(
        holds(is_symmetric_poisson(&ndk.pair, &s())),
        "non-deg-Kill sp",
    );
    o.require(
        !holds(is_strong(&ndk.pair, &s())),
        "non-deg-Kill not strong",
    );
    let d = ndk.nabla.covariant_derivative(&ndk.metric).unwrap();
    let pts = ndk.metric.chart().samples(&s().with_count(5));
    let worst = pts
        .iter()
        .map(|x| {
            let got = d.component(0, &[1, 1]).eval(x).unwrap();
            rel_dev(got, -2.0 * (2.0 * (x[0] + x[1])).exp())
        })
        .fold(0.0, f64::max);
    o.require(
        worst <= 1e-9,
        format!("(∇_∂x g)(∂y,∂y) deviation {worst:e}"),
    );

    let mut checked = 0;
    for entry in li_catalog() {
        if !["so3", "aff1", "aff1_generic", "su2", "aff1xR"].contains(&entry.id) {
            continue;
        }
        let got = li_verdicts(&entry).unwrap();
        let want = entry.expected;
        o.require(
            got.symmetric_poisson == want.symmetric_poisson
                && got.strong == want.strong
                && got.parallel == want.parallel
                && got.involutive == want.involutive,
            format!("{} algebraic verdicts", entry.id),
        );
        checked += 1;
    }
    o.require(checked == 5, "all Lie group examples present");
    o.note(format!(
        "(∇_∂x g)(∂y,∂y) max deviation {worst:.1e}; {checked} Lie group examples"
    ));
    o
}

/// `Σ_j Σ_i ⟨X_j, Y_i⟩_s ⊙ (remaining factors)`.
fn decomposable_oracle(
    nabla: &TorsionFree,
    xs: &[SymTensorField],
    ys: &[SymTensorField],
) -> SymTensorField {
    let c = nabla.chart().clone();
    let mut acc = SymTensorField::zero(&c, xs.len() + ys.len() - 1).unwrap();
    for j in 0..xs.len() {
        for i in 0..ys.len() {
            let mut term = symmetric_bracket(nabla, &xs[j], &ys[i]).unwrap();
            for (k, xk) in xs.iter().enumerate() {
                if k != j {
                    term = term.sym_product(xk).unwrap();
                }
            }
            for (k, yk) in ys.iter().enumerate() {
                if k != i {
                    term = term.sym_product(yk).unwrap();
                }
            }
            acc = acc.add(&term).unwrap();
        }
    }
    acc
}

fn product(fields: &[SymTensorField]) -> SymTensorField {
    fields[1..]
        .iter()
        .fold(fields[0].clone(), |acc, f| acc.sym_product(f).unwrap())
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let mut r = rng(0xC2);
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let n = 2 + case % 2;
        let c = Arc::new(Chart::standard(n));
        let nabla = random_connection(&mut r, &c, 1);
        let (p, q) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let xs: Vec<SymTensorField> = (0..p).map(|_| random_field(&mut r, &c, 1, 1)).collect();
        let ys: Vec<SymTensorField> = (0..q).map(|_| random_field(&mut r, &c, 1, 1)).collect();
        let got = schouten(&nabla, &product(&xs), &product(&ys)).unwrap();
        let want = decomposable_oracle(&nabla, &xs, &ys);
        let dev = max_rel_dev(&got, &want, &c.samples(&s()));
        worst = worst.max(dev);
        o.require(
            dev <= 1e-8,
            format!("pair {case} (degrees {p},{q}) deviation {dev:e}"),
        );
    }
    o.note(format!("50 pairs, max relative deviation {worst:.1e}"));
    o
}

fn random_state(r: &mut ChaCha8Rng, n: usize) -> CotangentState {
    let x = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
    let p = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
    CotangentState::new(x, p).unwrap()
}

fn phase_dev(a: &PhaseField, b: &PhaseField, states: &[CotangentState]) -> f64 {
    states
        .iter()
        .map(|st| rel_dev(a.eval(st).unwrap(), b.eval(st).unwrap()))
        .fold(0.0, f64::max)
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    let mut r = rng(0xC3);
    let (mut worst_pw, mut worst_can): (f64, f64) = (0.0, 0.0);
    for case in 0..50 {
        let n = 2 + case % 2;
        let c = Arc::new(Chart::standard(n));
        let nabla = random_connection(&mut r, &c, 1);
        let (da, db) = loop {
            let d = (r.gen_range(0..=3), r.gen_range(0..=3));
            if d != (0, 0) {
                break d;
            }
        };
        let a: SymTensorField = random_field(&mut r, &c, da, 2);
        let b: SymTensorField = random_field(&mut r, &c, db, 2);
        let states: Vec<CotangentState> = (0..25).map(|_| random_state(&mut r, n)).collect();

        let lhs = vertical_lift(&schouten(&nabla, &a, &b).unwrap());
        let rhs = pw_bracket(&nabla, &vertical_lift(&a), &vertical_lift(&b)).unwrap();
        let dev = phase_dev(&lhs, &rhs, &states);
        worst_pw = worst_pw.max(dev);
        o.require(
            dev <= 1e-9,
            format!("pair {case}: PW bracket deviation {dev:e}"),
        );

        let lhs = vertical_lift(&anticommutative_schouten(&a, &b).unwrap());
        let can = canonical_bracket(&vertical_lift(&a), &vertical_lift(&b)).unwrap();
        let rhs = PhaseField::new(&c, -can.into_expr()).unwrap();
        let dev = phase_dev(&lhs, &rhs, &states);
        worst_can = worst_can.max(dev);
        o.require(
            dev <= 1e-9,
            format!("pair {case}: canonical bracket deviation {dev:e}"),
        );
    }
    o.note(format!(
        "50 pairs, max deviation {worst_pw:.1e} (symmetric), {worst_can:.1e} (canonical)"
    ));
    o
}

fn sp_scenarios() -> Vec<(&'static str, SymPoissonPair, CotangentState)> {
    let st = |x: Vec<f64>, p: Vec<f64>| CotangentState::new(x, p).unwrap();
    let line = Arc::new(Chart::with_names(&["x"]).unwrap());
    let family = one_dim_family(
        &line,
        2.0,
        &(Expr::var(0) * 0.5 + Expr::powi(&Expr::var(0), 2) * 0.25),
    )
    .unwrap();
    vec![
        (
            "flat",
            structures::flat(1, 1),
            st(vec![0.1, 0.2], vec![0.7, -0.4]),
        ),
        (
            "inclusion",
            structures::inclusion_default(),
            st(vec![0.0, 0.5], vec![0.8, 0.3]),
        ),
        (
            "non_deg_killing",
            structures::non_deg_killing().pair,
            st(vec![0.1, -0.2], vec![0.5, 0.6]),
        ),
        (
            "rotation",
            structures::three_foliations(PlaneField::Rotation),
            st(vec![1.0, 0.0], vec![0.3, 0.9]),
        ),
        ("line_family", family, st(vec![0.2], vec![0.9])),
    ]
}

fn max_abs_drift(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max((x - v[0]).abs()))
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    for (name, pair, s0) in sp_scenarios() {
        o.require(
            holds(is_symmetric_poisson(&pair, &s())),
            format!("{name} is symmetric Poisson"),
        );
        let h = vertical_lift(pair.theta());
        let traj = integrate_pw(pair.nabla(), &h, &s0, 1e-3, 1000).unwrap();
        let hd = traj.channel("H").unwrap().drift();
        let sd = max_abs_drift(&monitor_speed_square(&pair, &traj).unwrap());
        o.require(
            hd <= 1e-8 && sd <= 1e-8,
            format!("{name}: H drift {hd:e}, Sq drift {sd:e}"),
        );
        o.note(format!("{name}: H drift {hd:.1e}, Sq drift {sd:.1e}"));
    }
    let non = structures::non_example();
    let s0 = CotangentState::new(vec![1.0], vec![0.5]).unwrap();
    let traj = integrate_pw(non.nabla(), &vertical_lift(non.theta()), &s0, 1e-3, 1000).unwrap();
    let sd = max_abs_drift(&monitor_speed_square(&non, &traj).unwrap());
    o.require(sd >= 1e-3, format!("non-example Sq drift {sd:e}"));
    o.note(format!("non-example Sq drift {sd:.2e}"));
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    let mut worst: f64 = 0.0;
    for (name, pair, s0) in sp_scenarios() {
        let traj =
            integrate_pw(pair.nabla(), &vertical_lift(pair.theta()), &s0, 1e-3, 1000).unwrap();
        let geo = monitor_geodesic_residual(&pair, &traj).unwrap();
        worst = worst.max(geo.max_residual());
        o.require(
            geo.max_residual() <= 1e-6,
            format!("{name}: residual {:e}", geo.max_residual()),
        );
    }
    let non = structures::non_example();
    let s0 = CotangentState::new(vec![1.0], vec![0.5]).unwrap();
    let traj = integrate_pw(non.nabla(), &vertical_lift(non.theta()), &s0, 1e-3, 1000).unwrap();
    let geo = monitor_geodesic_residual(&non, &traj).unwrap();
    o.require(
        geo.max_residual() <= 1e-5,
        format!("non-example mismatch {:e}", geo.max_residual()),
    );
    o.require(
        geo.max_predicted() > 0.1,
        "non-example obstruction is visible",
    );
    o.note(format!(
        "sp residual {worst:.1e}; non-example obstruction up to {:.2}, mismatch {:.1e}",
        geo.max_predicted(),
        geo.max_residual()
    ));
    o
}

fn harmonic(dt: f64) -> Trajectory {
    let c = Arc::new(Chart::with_names(&["x"]).unwrap());
    let g = SymFormField::from_fn(&c, 2, |_| Expr::one()).unwrap();
    let f = Expr::powi(&Expr::var(0), 2) * 0.5;
    let steps = (TAU / dt).round() as usize;
    run_newtonian(&g, &f, &[1.0], &[0.0], TAU / steps as f64, steps).unwrap()
}

fn cos_error(traj: &Trajectory) -> f64 {
    traj.states()
        .iter()
        .enumerate()
        .map(|(k, st)| (st.x[0] - traj.time(k).cos()).abs())
        .fold(0.0, f64::max)
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let traj = harmonic(1e-3);
    let err = cos_error(&traj);
    o.require(
        (traj.time(traj.states().len() - 1) - 2.0 * PI).abs() < 1e-12,
        "one full period",
    );
    o.require(err <= 1e-6, format!("cos error {err:e}"));
    let ratio = cos_error(&harmonic(0.1)) / cos_error(&harmonic(0.05));
    o.require(ratio >= 12.0, format!("error ratio {ratio}"));
    o.note(format!("cos error {err:.1e}, halving ratio {ratio:.2}"));
    o
}

fn random_invertible(r: &mut ChaCha8Rng, n: usize) -> RatMatrix {
    loop {
        let m = RatMatrix::from_fn(n, n, |_, _| int(r.gen_range(-2..=2)));
        if m.inverse().is_some() {
            return m;
        }
    }
}

/// Catalog algebras in random bases, truncated polynomial algebras,
/// nilpotent algebras and sparse random constants.
fn algebra_battery() -> Vec<CommutativeAlgebra> {
    let mut r = rng(0xC7);
    let small: Vec<CommutativeAlgebra> = catalog()
        .into_iter()
        .map(|e| e.algebra)
        .filter(|a| a.dim() <= 4)
        .collect();
    (0..100)
        .map(|k| {
            let n = r.gen_range(2..=4);
            match k % 5 {
                0 | 1 => {
                    let pool: Vec<_> = small.iter().filter(|a| a.dim() == n).collect();
                    let base = pool[r.gen_range(0..pool.len())];
                    base.basis_change(&random_invertible(&mut r, n)).unwrap()
                }
                2 => {
                    let offset = usize::from(r.gen_bool(0.5));
                    CommutativeAlgebra::from_fn(n, |k, i, j| int((i + j + offset == k) as i64))
                        .unwrap()
                }
                3 => CommutativeAlgebra::from_fn(n, |k, i, j| {
                    if k > i.max(j) {
                        int(r.gen_range(-1..=1))
                    } else {
                        int(0)
                    }
                })
                .unwrap(),
                _ => CommutativeAlgebra::from_fn(n, |_, _, _| {
                    if r.gen_bool(0.25) {
                        int(r.gen_range(-2..=2))
                    } else {
                        int(0)
                    }
                })
                .unwrap(),
            }
        })
        .collect()
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let mut exceptions = 0;
    let mut jj_count = 0;
    for alg in algebra_battery() {
        let pair = to_linear_structure(&alg);
        let jj = alg.is_jacobi_jordan();
        let strong_alg = jj && alg.is_associative();
        let sp = holds(is_symmetric_poisson(&pair, &s()));
        let strong = holds(is_strong(&pair, &s()));
        if jj != sp || strong_alg != strong {
            exceptions += 1;
        }
        jj_count += usize::from(jj);
    }
    o.require(exceptions == 0, format!("{exceptions} verdict exceptions"));
    o.note(format!(
        "100 algebras ({jj_count} Jacobi-Jordan), {exceptions} exceptions"
    ));

    let table: Vec<_> = catalog()
        .into_iter()
        .filter(|e| e.algebra.dim() <= 4)
        .collect();
    o.require(table.len() == 9, "nine low-dimensional catalog entries");
    for entry in &table {
        o.require(
            holds(is_strong(&to_linear_structure(&entry.algebra), &s())),
            format!("{} strong", entry.id),
        );
    }

    let a = catalog_entry("dim5_nonassoc").unwrap().algebra;
    let pair = to_linear_structure(&a);
    o.require(holds(is_symmetric_poisson(&pair, &s())), "dim5 sp");
    o.require(!holds(is_strong(&pair, &s())), "dim5 not strong");
    let n = a.dim();
    let closed = (0..n)
        .all(|i| (i + 1..n).all(|j| a.in_generator_span(&a.generator_bracket(i, j)).is_some()));
    o.require(closed, "dim5 generators closed under commutators");
    // X₁ = θ(dx¹), X₃ = θ(dx⁴), X₄ = −2θ(dx⁵) with the commutator of vector
    // fields as the matrix commutator in reverse order.
    let (x1, x3, x4) = (
        a.generator_matrix(0),
        a.generator_matrix(3),
        a.generator_matrix(4).scale(&int(-2)),
    );
    let commutator = x3.mul(&x1).sub(&x1.mul(&x3));
    let ratio = commutator.ratio_to(&x4);
    let shown = ratio
        .as_ref()
        .map_or("not a multiple".to_string(), |q| q.to_string());
    o.require(
        ratio == Some(rat(1, 2)),
        format!("[X1,X3] = {shown}·X4, stated 1/2·X4"),
    );
    o
}

fn gram(data: &CharacteristicData, coords: &[usize]) -> DMatrix<f64> {
    let mut vecs = DMatrix::zeros(data.point.len(), coords.len());
    for (c, &i) in coords.iter().enumerate() {
        vecs[(i, c)] = 1.0;
    }
    data.gram_on(&vecs)
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let pair = to_linear_structure(&catalog_entry("dim5_nonassoc").unwrap().algebra);
    let theta = pair.theta();
    let mut worst: f64 = 0.0;
    let mut r = rng(0xC8);
    for k in 0..10 {
        let t = if k % 2 == 0 { 1.0 } else { -1.0 } * r.gen_range(0.3..2.0);
        let (x2, x5) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
        let data = characteristic_data(
            theta,
            &[r.gen_range(-2.0..2.0), x2, t, r.gen_range(-2.0..2.0), x5],
        )
        .unwrap();
        o.require(
            data.rank == 4 && data.signature == (2, 2),
            format!("generic point {k}: rank {}", data.rank),
        );
        #[rustfmt::skip]
        let want = DMatrix::from_row_slice(4, 4, &[
            0.0,      0.0,                0.0,     -2.0 / t,
            0.0,      0.0,                1.0 / t, 2.0 * x5 / (t * t),
            0.0,      1.0 / t,            0.0,     0.0,
            -2.0 / t, 2.0 * x5 / (t * t), 0.0,     -4.0 * x2 / (t * t),
        ]);
        worst = worst.max((gram(&data, &[0, 1, 3, 4]) - want).abs().max());
    }
    for (a, b) in [(1.0, 0.5), (-0.7, 2.0), (1.5, -1.0)] {
        let data = characteristic_data(theta, &[0.3, b, 0.0, -1.2, a]).unwrap();
        o.require(
            data.rank == 2 && data.signature == (1, 1),
            format!("x5 = {a}: rank {}", data.rank),
        );
        let want = DMatrix::from_row_slice(2, 2, &[0.0, 1.0 / a, 1.0 / a, -b / (a * a)]);
        worst = worst.max((gram(&data, &[0, 3]) - want).abs().max());
    }
    for b in [2.0, -0.5] {
        let data = characteristic_data(theta, &[1.0, b, 0.0, 0.7, 0.0]).unwrap();
        let sig = if b > 0.0 { (1, 0) } else { (0, 1) };
        o.require(
            data.rank == 1 && data.signature == sig,
            format!("x2 = {b}: rank {}", data.rank),
        );
        worst = worst.max((gram(&data, &[0])[(0, 0)] - 1.0 / b).abs());
    }
    let origin = characteristic_data(theta, &[0.4, 0.0, 0.0, -0.3, 0.0]).unwrap();
    o.require(origin.rank == 0, "point leaves have rank 0");
    o.require(worst <= 1e-8, format!("Gram deviation {worst:e}"));
    o.note(format!("15 probes, max Gram deviation {worst:.1e}"));
    o
}

fn random_metric(r: &mut ChaCha8Rng, c: &Arc<Chart>) -> SymFormField {
    let n = c.dim();
    let euclid = SymFormField::from_fn(c, 2, |ij| {
        if ij[0] == ij[1] {
            Expr::one()
        } else {
            Expr::zero()
        }
    })
    .unwrap();
    match r.gen_range(0..3) {
        0 => euclid,
        1 => {
            let diag: Vec<Expr> = (0..n)
                .map(|_| Expr::one() + Expr::powi(&random_poly(r, n, 1, 2), 2))
                .collect();
            SymFormField::from_fn(c, 2, |ij| {
                if ij[0] == ij[1] {
                    diag[ij[0]].clone()
                } else {
                    Expr::zero()
                }
            })
            .unwrap()
        }
        _ => euclid.scale(&(Expr::one() + Expr::powi(&random_poly(r, n, 1, 2), 2))),
    }
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    let mut r = rng(0xC9);
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let n = 2 + case % 2;
        let c = Arc::new(Chart::standard(n));
        let nabla = random_connection(&mut r, &c, 1);
        let (p, q, deg) = (r.gen_range(0..=3), r.gen_range(0..=3), r.gen_range(0..=3));
        let x: SymTensorField = random_field(&mut r, &c, p, 1);
        let y: SymTensorField = random_field(&mut r, &c, q, 1);
        let phi: SymFormField = random_field(&mut r, &c, deg, 1);
        let v = derived_bracket_check(&nabla, &x, &y, &phi)
            .unwrap()
            .check_zero(&s())
            .unwrap();
        worst = worst.max(v.max_residual);
        o.require(
            v.holds,
            format!(
                "triple {case} ({p},{q},{deg}): residual {:e}",
                v.max_residual
            ),
        );
    }
    let mut agree = 0;
    for case in 0..50 {
        let n = r.gen_range(2..=3);
        let c = Arc::new(Chart::standard(n));
        let g = random_metric(&mut r, &c);
        let k = match case % 3 {
            0 => g.scale(&Expr::constant(coeff(&mut r))),
            1 => g.sym_product(&g).unwrap(),
            _ => {
                let deg = r.gen_range(0..=3);
                random_field(&mut r, &c, deg, 2)
            }
        };
        let a = killing_via_schouten(&g, &k, &s()).unwrap();
        let b = is_killing(&levi_civita(&g, &s()).unwrap(), &k, &s()).unwrap();
        o.require(
            a.holds == b.holds,
            format!("Killing pair {case}: {} vs {}", a.holds, b.holds),
        );
        agree += usize::from(a.holds == b.holds);
    }
    o.note(format!(
        "derived bracket residual {worst:.1e}; Killing verdicts agree {agree}/50"
    ));
    o
}

fn one_form(r: &mut ChaCha8Rng, c: &Arc<Chart>) -> SymFormField {
    random_field(r, c, 1, 2)
}

fn flat_strong_pairs(r: &mut ChaCha8Rng) -> Vec<SymPoissonPair> {
    let mut out = vec![structures::inclusion_default(), structures::flat(1, 2)];
    for _ in 0..2 {
        let h = random_poly(r, 1, 2, 3).substitute(&[Expr::var(1)]);
        out.push(structures::inclusion(&h));
        let c = Arc::new(Chart::standard(3));
        let theta = SymTensorField::from_fn(&c, 2, |_| Expr::constant(coeff(r))).unwrap();
        out.push(SymPoissonPair::euclidean(theta).unwrap());
    }
    let (alg, frame) = coordinate_frame("heisenberg3").unwrap();
    let nabla0 = weitzenboeck0(&alg);
    let z = LeftInvariantSymTensor::from_fn(3, 2, |ij| int((ij == [2, 2]) as i64)).unwrap();
    assert!(li_is_strong(&alg, &nabla0, &z).unwrap());
    let nabla = frame.export_connection(&nabla0, &s()).unwrap();
    out.push(SymPoissonPair::new(frame.export_tensor(&z).unwrap(), nabla).unwrap());
    out
}

fn criterion_10() -> Outcome {
    let mut o = Outcome::new();
    let tol = s().with_tol(1e-8);
    let mut r = rng(0xCA);
    for case in 0..10 {
        let n = 2 + case % 2;
        let c = Arc::new(Chart::standard(n));
        let theta: SymTensorField = random_field(&mut r, &c, 2, 1);
        let pair = SymPoissonPair::new(theta, random_connection(&mut r, &c, 1)).unwrap();
        let (a, b) = (one_form(&mut r, &c), one_form(&mut r, &c));
        let f = random_poly(&mut r, n, 2, 3);
        let anti = antisymmetry_residual(&pair, &a, &b)
            .unwrap()
            .check_zero(&tol)
            .unwrap();
        let leib = leibniz_residual(&pair, &a, &b, &f)
            .unwrap()
            .check_zero(&tol)
            .unwrap();
        o.require(
            anti.holds && leib.holds,
            format!("almost-Lie on arbitrary pair {case}"),
        );
    }
    let strong_pairs = [
        structures::inclusion_default(),
        structures::three_foliations(PlaneField::Radial),
        structures::regular_rank_two(),
    ];
    for (k, pair) in strong_pairs.iter().enumerate() {
        o.require(
            holds(is_strong(pair, &s())),
            format!("strong pair {k} is strong"),
        );
        let c = pair.chart().clone();
        let (a, b) = (one_form(&mut r, &c), one_form(&mut r, &c));
        let v = anchor_residual(pair, &a, &b)
            .unwrap()
            .check_zero(&tol)
            .unwrap();
        o.require(
            v.holds,
            format!("anchor on strong pair {k}: {:e}", v.max_residual),
        );
    }
    for (k, pair) in flat_strong_pairs(&mut r).iter().enumerate() {
        let c = pair.chart().clone();
        let curv = pair.nabla().curvature();
        o.require(
            check_zero(curv.components(), &c.samples(&s()), 1e-9)
                .unwrap()
                .holds,
            format!("pair {k} flat"),
        );
        let forms = [
            one_form(&mut r, &c),
            one_form(&mut r, &c),
            one_form(&mut r, &c),
        ];
        let jac = jacobi_residual(pair, &forms[0], &forms[1], &forms[2])
            .unwrap()
            .check_zero(&tol)
            .unwrap();
        o.require(
            jac.holds,
            format!("Jacobi on flat strong pair {k}: {:e}", jac.max_residual),
        );
        let f = random_poly(&mut r, c.dim(), 2, 3);
        let all = check_axioms(pair, [&forms[0], &forms[1], &forms[2]], &f, &tol).unwrap();
        o.require(all.lie(), format!("flat strong pair {k} is Lie"));
    }

    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (a, b, c) = (
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
        );
        let t = r.gen_range(-5.0..5.0);
        let q: [f64; 4] = std::array::from_fn(|_| r.gen_range(-1.0..1.0));
        let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        let q = q.map(|v| v / norm);
        let hm = hopf_matrix(a, b, c);
        let want = (Matrix4::from_fn(|i, j| hm[i][j]) * t).exp() * Vector4::from(q);
        let got = su2_flow(a, b, c, q, t).unwrap();
        worst = (0..4).fold(worst, |m, k| m.max((got[k] - want[k]).abs()));
        if (a, b, c) != (0.0, 0.0, 0.0) {
            // Along the first generator the flow is a pair of plane rotations.
            let got = su2_flow(1.0, 0.0, 0.0, q, t).unwrap();
            let (co, si) = (t.cos(), t.sin());
            let closed = [
                q[0] * co - q[1] * si,
                q[1] * co + q[0] * si,
                q[2] * co + q[3] * si,
                q[3] * co - q[2] * si,
            ];
            worst = (0..4).fold(worst, |m, k| m.max((got[k] - closed[k]).abs()));
        }
    }
    o.require(worst <= 1e-8, format!("Hopf flow deviation {worst:e}"));
    o.note(format!("Hopf flow max deviation {worst:.1e}"));
    o
}

fn criterion_11() -> Outcome {
    let mut o = Outcome::new();
    let mut r = rng(0xCB);
    let c = Arc::new(Chart::with_names(&["x"]).unwrap());
    for k in 0..10 {
        let lambda = r.gen_range(0.1..5.0);
        let big_h = random_poly(&mut r, 1, 3, 3);
        let pair = one_dim_family(&c, lambda, &big_h).unwrap();
        o.require(
            holds(is_symmetric_poisson(&pair, &s())),
            format!("member {k} (λ = {lambda:.3})"),
        );
        let f = pair.theta().component(&[0, 0]).clone();
        let bumped = f * (Expr::one() + Expr::var(0) * 0.01);
        let theta = SymTensorField::from_fn(&c, 2, |_| bumped.clone()).unwrap();
        let perturbed = SymPoissonPair::new(theta, pair.nabla().clone()).unwrap();
        o.require(
            !holds(is_symmetric_poisson(&perturbed, &s())),
            format!("perturbed member {k}"),
        );
    }
    o.note("10 members pass, 10 perturbations fail");
    o
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("example battery", criterion_1),
        ("Schouten cross-validation", criterion_2),
        ("vertical-lift isomorphism", criterion_3),
        ("PW conservation", criterion_4),
        ("geodesic projection", criterion_5),
        ("Newtonian reduction", criterion_6),
        ("linear-structure bijection", criterion_7),
        ("R5 stratification", criterion_8),
        ("derived bracket and Killing", criterion_9),
        ("algebroid axioms and Hopf flow", criterion_10),
        ("one-dimensional family", criterion_11),
    ];
    let mut unexpected = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let k = i + 1;
        let start = Instant::now();
        let out = run();
        let known = KNOWN_FAILURES.contains(&k);
        let tag = match (out.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!(
            "criterion {k:>2} {tag:<12} {name} [{:.1}s]",
            start.elapsed().as_secs_f64()
        );
        for note in &out.notes {
            println!("    {note}");
        }
        if out.pass == known {
            unexpected.push(k);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
