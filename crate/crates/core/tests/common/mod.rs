#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sympoisson::expr::Expr;
use sympoisson::geometry::{Chart, Connection, SymField, TorsionFree, Variance};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small dyadic coefficient in [-2, 2].
pub fn coeff(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-8i32..=8) as f64 / 4.0
}

/// Random polynomial in `n` variables of total degree at most `max_deg`.
pub fn random_poly(rng: &mut ChaCha8Rng, n: usize, max_deg: u32, terms: usize) -> Expr {
    let mut acc = Expr::zero();
    for _ in 0..terms {
        let mut mono = Expr::constant(coeff(rng));
        let deg = rng.gen_range(0..=max_deg);
        for _ in 0..deg {
            let v = rng.gen_range(0..n);
            mono = mono * Expr::var(v);
        }
        acc = acc + mono;
    }
    acc
}

pub fn random_field<V: Variance>(
    rng: &mut ChaCha8Rng,
    chart: &Arc<Chart>,
    degree: usize,
    max_deg: u32,
) -> SymField<V> {
    let n = chart.dim();
    SymField::from_fn(chart, degree, |_| random_poly(rng, n, max_deg, 3)).unwrap()
}

/// Random torsion-free connection with polynomial Christoffel symbols.
pub fn random_connection(rng: &mut ChaCha8Rng, chart: &Arc<Chart>, max_deg: u32) -> TorsionFree {
    let n = chart.dim();
    let mut conn = Connection::euclidean(chart);
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let g = random_poly(rng, n, max_deg, 2);
                conn = conn.with_symmetric(k, i, j, g).unwrap();
            }
        }
    }
    conn.torsion_free_part()
}

/// Largest `|a - b| / (1 + max(|a|, |b|))` over components and points.
pub fn max_rel_dev<V: Variance>(a: &SymField<V>, b: &SymField<V>, pts: &[Vec<f64>]) -> f64 {
    assert_eq!(a.degree(), b.degree());
    let mut worst: f64 = 0.0;
    for x in pts {
        let va = a.eval_at(x).unwrap();
        let vb = b.eval_at(x).unwrap();
        for (p, q) in va.iter().zip(&vb) {
            worst = worst.max((p - q).abs() / (1.0 + p.abs().max(q.abs())));
        }
    }
    worst
}

pub fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}
