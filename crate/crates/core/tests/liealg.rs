mod common;

use common::*;
use nalgebra::Matrix4;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sympoisson::exact::{int, rat, Rat, RatMatrix};
use sympoisson::geometry::lie_bracket;
use sympoisson::liealg::*;
use sympoisson::poisson::{is_strong, is_symmetric_poisson, SymPoissonPair};
use sympoisson::sampling::Sampling;

fn unit(n: usize, i: usize) -> Vec<Rat> {
    (0..n).map(|k| int((k == i) as i64)).collect()
}

fn vector(n: usize, i: usize) -> LeftInvariantSymTensor {
    LeftInvariantSymTensor::vector(unit(n, i)).unwrap()
}

fn sym2(n: usize, entries: &[(usize, usize, Rat)]) -> LeftInvariantSymTensor {
    let mut m = RatMatrix::zeros(n, n);
    for (i, j, v) in entries {
        m.set(*i, *j, v.clone());
        m.set(*j, *i, v.clone());
    }
    LeftInvariantSymTensor::from_matrix(&m).unwrap()
}

fn so3_theta() -> LeftInvariantSymTensor {
    sym2(3, &[(0, 0, int(1)), (1, 1, int(1))])
}

#[test]
fn weitzenboeck_examples() {
    let ab = LieAlgebra::abelian(3).unwrap();
    let w = weitzenboeck0(&ab);
    assert_eq!(w, LeftInvariantConnection::flat(3).unwrap());

    let g = so3();
    let w = weitzenboeck0(&g);
    assert_eq!(
        w.apply(&unit(3, 0), &unit(3, 1)),
        vec![int(0), int(0), rat(1, 2)]
    );
    for id in ["so3", "su2", "aff1", "aff1xR", "heisenberg3", "abelian_4"] {
        let alg = catalog_algebra(id).unwrap();
        weitzenboeck0(&alg).check_torsion_free(&alg).unwrap();
    }
    let flat = LeftInvariantConnection::flat(3).unwrap();
    assert!(matches!(
        flat.check_torsion_free(&g),
        Err(LieError::Torsion { .. })
    ));
    aff1_x_r_connection()
        .check_torsion_free(&aff1_x_r())
        .unwrap();
}

#[test]
fn symmetric_bracket_of_weitzenboeck_vanishes() {
    for id in ["so3", "su2", "aff1", "aff1xR", "heisenberg3"] {
        let alg = catalog_algebra(id).unwrap();
        let w = weitzenboeck0(&alg);
        let n = alg.dim();
        for i in 0..n {
            for j in 0..n {
                let b = li_symmetric_bracket(&w, i, j);
                assert!(b.iter().all(|v| *v == int(0)), "{id}");
                // The same bracket through the trace formula on vectors.
                let s = li_schouten(&w, &vector(n, i), &vector(n, j)).unwrap();
                assert!(s.is_zero());
            }
        }
    }
    // A connection with nonzero symmetric part.
    let nabla = aff1_x_r_connection();
    assert_eq!(
        li_symmetric_bracket(&nabla, 0, 0),
        vec![int(-2), int(0), int(0)]
    );
    let s = li_schouten(&nabla, &vector(3, 0), &vector(3, 0)).unwrap();
    assert_eq!(s.components(), &[int(-2), int(0), int(0)]);
}

#[test]
fn so3_derivative_and_verdicts() {
    let g = so3();
    let w = weitzenboeck0(&g);
    let theta = so3_theta();
    let d = li_covariant_derivative(&w, &theta, 0).unwrap();
    // ½(X₃⊗X₂ + X₂⊗X₃), which is ½ X₃⊙X₂ with the unnormalized product.
    let want = vector(3, 2)
        .sym_product(&vector(3, 1))
        .unwrap()
        .scale(&rat(1, 2));
    assert_eq!(d, want);
    assert_eq!(d.component(&[1, 2]), &rat(1, 2));
    assert!(!d.is_zero());
    assert!(li_is_symmetric_poisson(&g, &w, &theta).unwrap());
    assert!(!li_is_strong(&g, &w, &theta).unwrap());
    assert!(!li_is_involutive(&g, &theta).unwrap());
}

#[test]
fn abelian_tensors_are_parallel() {
    let mut rng = rng(3);
    let ab = LieAlgebra::abelian(4).unwrap();
    let w = weitzenboeck0(&ab);
    for degree in 1..=3 {
        let t = LeftInvariantSymTensor::from_fn(4, degree, |_| int(rng.gen_range(-3..=3))).unwrap();
        assert!(li_is_parallel(&w, &t).unwrap());
    }
}

#[test]
fn aff1_strong_iff_degenerate() {
    let g = aff1();
    let w = weitzenboeck0(&g);
    let mut strong_count = 0;
    for l1 in -3..=3 {
        for l2 in -3..=3 {
            for l3 in -3..=3 {
                let theta = sym2(2, &[(0, 0, int(l1)), (0, 1, int(l2)), (1, 1, int(l3))]);
                assert!(li_is_symmetric_poisson(&g, &w, &theta).unwrap());
                let strong = li_is_strong(&g, &w, &theta).unwrap();
                assert_eq!(strong, l1 * l3 - l2 * l2 == 0, "{l1} {l2} {l3}");
                assert_eq!(
                    li_is_parallel(&w, &theta).unwrap(),
                    (l1, l2, l3) == (0, 0, 0)
                );
                strong_count += strong as usize;
            }
        }
    }
    assert!(strong_count > 1);
}

#[test]
fn aff1_x_r_custom_connection() {
    let g = aff1_x_r();
    let theta = vector(3, 0).sym_product(&vector(3, 1)).unwrap();
    let nabla = aff1_x_r_connection();
    assert!(li_is_parallel(&nabla, &theta).unwrap());
    assert!(li_is_strong(&g, &nabla, &theta).unwrap());

    let w = weitzenboeck0(&g);
    assert!(li_is_symmetric_poisson(&g, &w, &theta).unwrap());
    assert!(!li_is_strong(&g, &w, &theta).unwrap());
    assert!(li_is_involutive(&g, &theta).unwrap());
    let d = li_covariant_derivative(&w, &theta, 0).unwrap();
    assert_eq!(d, theta.scale(&rat(1, 2)));
}

#[test]
fn curvature_examples() {
    let ab = LieAlgebra::abelian(3).unwrap();
    assert!(li_curvature(&ab, &weitzenboeck0(&ab)).unwrap().is_flat());
    let h = heisenberg3();
    assert!(li_curvature(&h, &weitzenboeck0(&h)).unwrap().is_flat());
    let g = so3();
    let r = li_curvature(&g, &weitzenboeck0(&g)).unwrap();
    assert_eq!(
        r.apply(&unit(3, 0), &unit(3, 1), &unit(3, 0)),
        vec![int(0), rat(-1, 4), int(0)]
    );
    assert!(!li_curvature(&aff1(), &weitzenboeck0(&aff1()))
        .unwrap()
        .is_flat());
}

#[test]
fn curvature_matches_double_bracket() {
    // R⁰(X, Y)Z = −¼[[X, Y], Z] on every frame triple.
    for alg in battery_algebras().iter().take(40) {
        let n = alg.dim();
        let r = li_curvature(alg, &weitzenboeck0(alg)).unwrap();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (x, y, z) = (unit(n, i), unit(n, j), unit(n, k));
                    let want: Vec<Rat> = alg
                        .bracket(&alg.bracket(&x, &y), &z)
                        .iter()
                        .map(|v| v * rat(-1, 4))
                        .collect();
                    assert_eq!(r.apply(&x, &y, &z), want);
                }
            }
        }
        let two_step = (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| {
                    alg.bracket(&alg.bracket(&unit(n, i), &unit(n, j)), &unit(n, k))
                        .iter()
                        .all(|v| *v == int(0))
                })
            })
        });
        assert_eq!(r.is_flat(), two_step);
    }
}

#[test]
fn killing_forms() {
    assert_eq!(so3().killing_form(), RatMatrix::identity(3).scale(&int(-2)));
    let b = su2().killing_form();
    assert_eq!(b, RatMatrix::identity(3).scale(&int(-8)));
    // Round metric g° = −B, and its inverse is strong with ∇⁰.
    let g_inv = b.scale(&int(-1)).inverse().unwrap();
    assert_eq!(g_inv, RatMatrix::identity(3).scale(&rat(1, 8)));
    let theta = LeftInvariantSymTensor::from_matrix(&g_inv).unwrap();
    let w = weitzenboeck0(&su2());
    assert!(li_is_strong(&su2(), &w, &theta).unwrap());
    assert!(li_is_parallel(&w, &theta).unwrap());
    assert!(!li_is_parallel(&weitzenboeck0(&su2()), &sym2(3, &[(0, 0, int(1))])).unwrap());
}

fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> RatMatrix {
    loop {
        let m = RatMatrix::from_fn(n, n, |_, _| int(rng.gen_range(-2..=2)));
        if m.inverse().is_some() {
            return m;
        }
    }
}

/// `ℝ ⋉_D ℝⁿ⁻¹`: `[X₀, Yₐ] = D^b_a Y_b`.
fn semidirect(rng: &mut ChaCha8Rng, n: usize) -> LieAlgebra {
    let mut brackets = Vec::new();
    for a in 1..n {
        for b in 1..n {
            let d = rng.gen_range(-2..=2);
            if d != 0 {
                brackets.push((0, a, b, int(d)));
            }
        }
    }
    LieAlgebra::from_brackets(n, &brackets).unwrap()
}

fn battery_algebras() -> Vec<LieAlgebra> {
    let mut rng = rng(77);
    let bases = [
        so3(),
        su2(),
        aff1(),
        aff1_x_r(),
        heisenberg3(),
        aff1().direct_sum(&aff1()),
        heisenberg3().direct_sum(&LieAlgebra::abelian(1).unwrap()),
        so3().direct_sum(&LieAlgebra::abelian(1).unwrap()),
        LieAlgebra::abelian(2).unwrap(),
    ];
    (0..200)
        .map(|k| {
            if k % 3 == 0 {
                let n = rng.gen_range(2..=4);
                semidirect(&mut rng, n)
            } else {
                let base = &bases[rng.gen_range(0..bases.len())];
                base.basis_change(&random_invertible(&mut rng, base.dim()))
                    .unwrap()
            }
        })
        .collect()
}

fn random_theta(rng: &mut ChaCha8Rng, n: usize) -> LeftInvariantSymTensor {
    if rng.gen_bool(0.4) {
        // X⊗X is autoparallel for ∇⁰, hence strong.
        let u: Vec<Rat> = (0..n).map(|_| int(rng.gen_range(-2..=2))).collect();
        LeftInvariantSymTensor::from_fn(n, 2, |ij| &u[ij[0]] * &u[ij[1]]).unwrap()
    } else {
        LeftInvariantSymTensor::from_fn(n, 2, |_| int(rng.gen_range(-2..=2))).unwrap()
    }
}

#[test]
fn left_invariant_battery() {
    let mut rng = rng(1234);
    let algebras = battery_algebras();
    assert_eq!(algebras.len(), 200);
    let (mut strong, mut weak) = (0, 0);
    for alg in &algebras {
        let n = alg.dim();
        assert!((2..=4).contains(&n));
        let w = weitzenboeck0(alg);
        let theta = random_theta(&mut rng, n);
        assert!(li_is_symmetric_poisson(alg, &w, &theta).unwrap());
        if li_is_strong(alg, &w, &theta).unwrap() {
            assert!(li_is_involutive(alg, &theta).unwrap());
            strong += 1;
        } else {
            weak += 1;
        }
    }
    assert!(strong >= 40 && weak >= 40, "{strong} vs {weak}");
}

#[test]
fn basis_change_round_trip() {
    let mut rng = rng(8);
    let g = so3();
    let p = random_invertible(&mut rng, 3);
    let h = g.basis_change(&p).unwrap();
    assert_eq!(h.basis_change(&p.inverse().unwrap()).unwrap(), g);
    assert_eq!(
        g.basis_change(&RatMatrix::zeros(3, 3)),
        Err(LieError::SingularBasisChange)
    );
}

fn s() -> Sampling {
    Sampling::default()
}

#[test]
fn coordinate_frames_realize_the_brackets() {
    for id in ["aff1", "aff1xR", "heisenberg3", "abelian_3"] {
        let (alg, frame) = coordinate_frame(id).unwrap();
        let n = alg.dim();
        let pts = frame.chart().samples(&s());
        for i in 0..n {
            for j in 0..n {
                let lb = lie_bracket(&frame.frame_field(i), &frame.frame_field(j)).unwrap();
                let want = frame
                    .export_tensor(
                        &LeftInvariantSymTensor::vector(alg.bracket(&unit(n, i), &unit(n, j)))
                            .unwrap(),
                    )
                    .unwrap();
                assert!(max_rel_dev(&lb, &want, &pts) < 1e-12, "{id} [{i},{j}]");
            }
        }
    }
    assert!(matches!(coordinate_frame("so3"), Err(LieError::NoFrame(_))));
}

#[test]
fn exported_verdicts_agree_with_frame_verdicts() {
    let mut rng = rng(99);
    for id in ["aff1", "aff1xR", "heisenberg3"] {
        let (alg, frame) = coordinate_frame(id).unwrap();
        let w = weitzenboeck0(&alg);
        let nabla = frame.export_connection(&w, &s()).unwrap();
        for _ in 0..6 {
            let theta = random_theta(&mut rng, alg.dim());
            let pair =
                SymPoissonPair::new(frame.export_tensor(&theta).unwrap(), nabla.clone()).unwrap();
            assert_eq!(
                is_symmetric_poisson(&pair, &s()).unwrap().holds,
                li_is_symmetric_poisson(&alg, &w, &theta).unwrap(),
                "{id}"
            );
            assert_eq!(
                is_strong(&pair, &s()).unwrap().holds,
                li_is_strong(&alg, &w, &theta).unwrap(),
                "{id}"
            );
        }
    }
    // The custom connection on aff(1) ⊕ ℝ makes X⊙Y parallel in coordinates too.
    let (_, frame) = coordinate_frame("aff1xR").unwrap();
    let nabla = frame
        .export_connection(&aff1_x_r_connection(), &s())
        .unwrap();
    let theta = vector(3, 0).sym_product(&vector(3, 1)).unwrap();
    let pair = SymPoissonPair::new(frame.export_tensor(&theta).unwrap(), nabla).unwrap();
    assert!(sympoisson::poisson::is_parallel(&pair, &s()).unwrap().holds);

    // ∇⁰ on the Heisenberg group is flat in coordinates.
    let (alg, frame) = coordinate_frame("heisenberg3").unwrap();
    let nabla = frame.export_connection(&weitzenboeck0(&alg), &s()).unwrap();
    let pts = frame.chart().samples(&s());
    let curv = nabla.connection().curvature();
    assert!(
        sympoisson::sampling::check_zero(curv.components(), &pts, 1e-12)
            .unwrap()
            .holds
    );
}

fn taylor_exp(m: &Matrix4<f64>) -> Matrix4<f64> {
    let norm = m.abs().max();
    let mut squarings = 0;
    let mut scaled = *m;
    while norm / 2f64.powi(squarings) > 0.1 {
        squarings += 1;
    }
    scaled /= 2f64.powi(squarings);
    let mut term = Matrix4::identity();
    let mut sum = Matrix4::identity();
    for k in 1..30 {
        term = term * scaled / k as f64;
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

fn unit_quaternion(rng: &mut ChaCha8Rng) -> [f64; 4] {
    let q: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    q.map(|v| v / n)
}

#[test]
fn hopf_flow_closed_form() {
    let mut rng = rng(17);
    let q = unit_quaternion(&mut rng);
    let t = std::f64::consts::FRAC_PI_3;
    let got = su2_flow(1.0, 0.0, 0.0, q, t).unwrap();
    let (c, s) = (t.cos(), t.sin());
    let want = [
        q[0] * c - q[1] * s,
        q[1] * c + q[0] * s,
        q[2] * c + q[3] * s,
        q[3] * c - q[2] * s,
    ];
    for k in 0..4 {
        assert!((got[k] - want[k]).abs() <= 1e-8);
    }
    assert_eq!(su2_flow(0.3, -1.2, 0.7, q, 0.0).unwrap(), q);
}

#[test]
fn hopf_flow_matches_matrix_exponential() {
    let mut rng = rng(23);
    for _ in 0..20 {
        let (a, b, c) = (
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        let t = rng.gen_range(-5.0..5.0);
        let q = unit_quaternion(&mut rng);
        let m = hopf_matrix(a, b, c);
        let m = Matrix4::from_fn(|i, j| m[i][j]) * t;
        let e = taylor_exp(&m);
        let want = e * nalgebra::Vector4::from(q);
        let got = su2_flow(a, b, c, q, t).unwrap();
        for k in 0..4 {
            assert!((got[k] - want[k]).abs() <= 1e-8);
        }
    }
}

#[test]
fn hopf_flow_preserves_norm_and_validates() {
    let mut rng = rng(29);
    let hm = hopf_matrix(0.4, -1.1, 0.8);
    let m = Matrix4::from_fn(|i, j| hm[i][j]);
    assert_eq!(m.transpose(), -m);
    let q = unit_quaternion(&mut rng);
    for k in 0..=400 {
        let t = 4.0 * std::f64::consts::PI * k as f64 / 400.0;
        let p = su2_flow(0.4, -1.1, 0.8, q, t).unwrap();
        let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() <= 1e-10);
    }
    assert!(matches!(
        su2_flow(1.0, 0.0, 0.0, [2.0, 0.0, 0.0, 0.0], 1.0),
        Err(LieError::NotUnit(_))
    ));
    assert_eq!(
        su2_flow(f64::NAN, 0.0, 0.0, q, 1.0),
        Err(LieError::NonFinite)
    );
}

#[test]
fn sym_product_and_contraction() {
    let x = vector(2, 0);
    let xx = x.sym_product(&x).unwrap();
    assert_eq!(xx.component(&[0, 0]), &int(2));
    let theta = sym2(2, &[(0, 0, int(3)), (0, 1, int(-1))]);
    let c = theta.contract_form(&[int(0), int(1)]).unwrap();
    assert_eq!(c.components(), &[int(-1), int(0)]);
    assert_eq!(
        theta.generators(),
        vec![vec![int(3), int(-1)], vec![int(-1), int(0)]]
    );
    assert_eq!(
        LeftInvariantSymTensor::new(2, 2, vec![int(1), int(2), int(3), int(4)]),
        Err(LieError::NotSymmetric)
    );
}

#[test]
fn shipped_catalog_verdicts() {
    let entries = sympoisson::liealg::li_catalog();
    assert_eq!(entries.len(), 7);
    for e in &entries {
        let got = sympoisson::liealg::li_verdicts(e).unwrap();
        assert_eq!(got, e.expected, "{}", e.id);
        // Parallel implies strong implies symmetric Poisson.
        assert!(!got.parallel || got.strong, "{}", e.id);
        assert!(!got.strong || got.symmetric_poisson, "{}", e.id);
    }
}
