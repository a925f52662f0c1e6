//! Ready-made structures used by the tests, the acceptance suite and the CLI.

use std::sync::Arc;

use crate::expr::Expr;
use crate::geometry::{Chart, Connection, SymFormField, SymTensorField, TorsionFree};
use crate::poisson::SymPoissonPair;

fn plane() -> Arc<Chart> {
    Arc::new(Chart::with_names(&["x", "y"]).expect("valid chart"))
}

fn line() -> Arc<Chart> {
    Arc::new(Chart::with_names(&["x"]).expect("valid chart"))
}

/// `Σ_{i≤p} ∂i⊗∂i − Σ_{j≤q} ∂_{p+j}⊗∂_{p+j}` with the flat connection.
pub fn flat(p: usize, q: usize) -> SymPoissonPair {
    let chart = Arc::new(Chart::standard(p + q));
    let theta = SymTensorField::from_fn(&chart, 2, |ij| {
        if ij[0] != ij[1] {
            Expr::zero()
        } else if ij[0] < p {
            Expr::one()
        } else {
            Expr::constant(-1.0)
        }
    })
    .expect("degree 2");
    SymPoissonPair::euclidean(theta).expect("valid pair")
}

/// `θ = 0` with a given torsion-free connection.
pub fn zero_with(nabla: TorsionFree) -> SymPoissonPair {
    let theta = SymTensorField::zero(nabla.chart(), 2).expect("degree 2");
    SymPoissonPair::new(theta, nabla).expect("valid pair")
}

/// `h(y) ∂x⊗∂x` on the plane with the flat connection.
pub fn inclusion(h: &Expr) -> SymPoissonPair {
    let chart = plane();
    let theta = SymTensorField::zero(&chart, 2)
        .and_then(|t| t.with_component(&[0, 0], h.clone()))
        .expect("degree 2");
    SymPoissonPair::euclidean(theta).expect("valid pair")
}

/// [`inclusion`] with `h(y) = 1 + y²`.
pub fn inclusion_default() -> SymPoissonPair {
    let y = Expr::var(1);
    inclusion(&(Expr::one() + Expr::powi(&y, 2)))
}

/// The connection `∇_{∂x}∂y = ∂x + ∂y`, `∇_{∂x}∂x = ∇_{∂y}∂y = 0` on the
/// plane, together with the metric `g = (e^{2y}dx) ⊙ (e^{2x}dy)`.
pub struct NonDegKilling {
    pub nabla: TorsionFree,
    pub metric: SymFormField,
    pub pair: SymPoissonPair,
}

pub fn non_deg_killing() -> NonDegKilling {
    let chart = plane();
    let nabla = Connection::euclidean(&chart)
        .with_symmetric(0, 0, 1, Expr::one())
        .and_then(|c| c.with_symmetric(1, 0, 1, Expr::one()))
        .expect("indices in range")
        .torsion_free_part();
    let x = Expr::var(0);
    let y = Expr::var(1);
    let a =
        SymFormField::vector(&chart, vec![(y.clone() * 2.0).exp(), Expr::zero()]).expect("dim 2");
    let b =
        SymFormField::vector(&chart, vec![Expr::zero(), (x.clone() * 2.0).exp()]).expect("dim 2");
    let metric = a.sym_product(&b).expect("same chart");
    let inv = (Expr::constant(-2.0) * (x + y)).exp();
    let theta = SymTensorField::zero(&chart, 2)
        .and_then(|t| t.with_component(&[0, 1], inv))
        .expect("degree 2");
    let pair = SymPoissonPair::new(theta, nabla.clone()).expect("valid pair");
    NonDegKilling {
        nabla,
        metric,
        pair,
    }
}

/// The three nowhere-vanishing fields of the punctured plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneField {
    /// `R = x∂x + y∂y`
    Radial,
    /// `S = −y∂x + x∂y`
    Rotation,
    /// `H = x∂x − y∂y`
    Hyperbolic,
}

impl PlaneField {
    pub fn components(self) -> [Expr; 2] {
        let x = Expr::var(0);
        let y = Expr::var(1);
        match self {
            PlaneField::Radial => [x, y],
            PlaneField::Rotation => [-y, x],
            PlaneField::Hyperbolic => [x, -y],
        }
    }
}

/// Punctured-plane chart sampled away from the origin.
pub fn punctured_plane() -> Arc<Chart> {
    Arc::new(
        Chart::new(vec!["x".into(), "y".into()], vec![(0.5, 1.5), (-1.0, 1.0)])
            .expect("valid chart"),
    )
}

/// `∇_{∂x}∂x = ∇_{∂y}∂y = ±R/(x²+y²)`, `∇_{∂x}∂y = 0`.
pub fn radial_connection(chart: &Arc<Chart>, sign: f64) -> TorsionFree {
    let x = Expr::var(0);
    let y = Expr::var(1);
    let r2 = Expr::powi(&x, 2) + Expr::powi(&y, 2);
    let comps = [x, y];
    Connection::from_fn(chart, |k, i, j| {
        if i == j {
            Expr::div(&comps[k].scale(sign), &r2)
        } else {
            Expr::zero()
        }
    })
    .torsion_free_part()
}

/// `X⊗X` for `X ∈ {R, S, H}` with the connection that makes `X` autoparallel
/// (`+` sign for `S`, `−` for `R` and `H`).
pub fn three_foliations(field: PlaneField) -> SymPoissonPair {
    let chart = punctured_plane();
    let sign = if field == PlaneField::Rotation {
        1.0
    } else {
        -1.0
    };
    let v = SymTensorField::vector(&chart, field.components().to_vec()).expect("dim 2");
    let theta = v
        .sym_product(&v)
        .expect("same chart")
        .scale(&Expr::constant(0.5));
    SymPoissonPair::new(theta, radial_connection(&chart, sign)).expect("valid pair")
}

/// `f(x) ∂x⊗∂x` on the line with the flat connection.
pub fn line_structure(f: &Expr) -> SymPoissonPair {
    let chart = line();
    let theta = SymTensorField::from_fn(&chart, 2, |_| f.clone()).expect("degree 2");
    SymPoissonPair::euclidean(theta).expect("valid pair")
}

/// `x ∂x⊗∂x`, which is not symmetric Poisson for any connection.
pub fn non_example() -> SymPoissonPair {
    line_structure(&Expr::var(0))
}

/// `e^z (∂x⊗∂x + ∂y⊗∂y)` on ℝ³: regular of rank 2, strong, not parallel.
pub fn regular_rank_two() -> SymPoissonPair {
    let chart = Arc::new(Chart::with_names(&["x", "y", "z"]).expect("valid chart"));
    let ez = Expr::var(2).exp();
    let theta = SymTensorField::from_fn(&chart, 2, |ij| {
        if ij[0] == ij[1] && ij[0] < 2 {
            ez.clone()
        } else {
            Expr::zero()
        }
    })
    .expect("degree 2");
    SymPoissonPair::euclidean(theta).expect("valid pair")
}
