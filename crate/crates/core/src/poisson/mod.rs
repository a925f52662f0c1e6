//! Symmetric Poisson pairs `(θ, ∇)` and their integrability verdicts.

mod characteristic;

use std::sync::Arc;

use crate::expr::Expr;
use crate::geometry::{
    directional, symmetric_bracket, Chart, Connection, GeometryError, SymFormField, SymTensorField,
    TorsionFree,
};
use crate::sampling::{check_zero, Sampling, Verdict};

pub use characteristic::{
    characteristic_data, involutivity_check, matrix_at, CharacteristicData, Involutivity,
    InvolutivityReport, RANK_THRESHOLD,
};

/// A symmetric bivector field together with a torsion-free connection on
/// the same chart.
#[derive(Debug, Clone)]
pub struct SymPoissonPair {
    theta: SymTensorField,
    nabla: TorsionFree,
}

impl SymPoissonPair {
    pub fn new(theta: SymTensorField, nabla: TorsionFree) -> Result<SymPoissonPair, GeometryError> {
        if theta.degree() != 2 {
            return Err(GeometryError::DegreeMismatch {
                left: theta.degree(),
                right: 2,
            });
        }
        if !std::ptr::eq(theta.chart().as_ref(), nabla.chart().as_ref())
            && **theta.chart() != **nabla.chart()
        {
            return Err(GeometryError::ChartMismatch);
        }
        Ok(SymPoissonPair { theta, nabla })
    }

    /// Pair with the flat connection of the chart.
    pub fn euclidean(theta: SymTensorField) -> Result<SymPoissonPair, GeometryError> {
        let nabla = TorsionFree::euclidean(theta.chart());
        SymPoissonPair::new(theta, nabla)
    }

    pub fn theta(&self) -> &SymTensorField {
        &self.theta
    }

    pub fn nabla(&self) -> &TorsionFree {
        &self.nabla
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.theta.chart()
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    /// `θ(α)` for a 1-form `α`.
    pub fn sharp(&self, alpha: &SymFormField) -> Result<SymTensorField, GeometryError> {
        self.theta.contract_form(alpha)
    }

    /// `θ(dx^i)`, the i-th generator of the characteristic module.
    pub fn generator(&self, i: usize) -> SymTensorField {
        self.sharp(&SymFormField::coordinate_form(self.chart(), i))
            .expect("same chart")
    }
}

/// `{f, g} = θ(df, dg) = θ^{ij} ∂_i f ∂_j g`.
pub fn poisson_bracket(pair: &SymPoissonPair, f: &Expr, g: &Expr) -> Expr {
    let n = pair.dim();
    let df: Vec<Expr> = (0..n).map(|i| f.diff(i)).collect();
    let dg: Vec<Expr> = (0..n).map(|j| g.diff(j)).collect();
    let mut terms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let t = pair.theta.component(&[i, j]);
            if t.is_const_zero() || df[i].is_const_zero() || dg[j].is_const_zero() {
                continue;
            }
            terms.push(Expr::mul(t, &Expr::mul(&df[i], &dg[j])));
        }
    }
    Expr::sum(terms)
}

/// `X_f = θ(df)`.
pub fn gradient(pair: &SymPoissonPair, f: &Expr) -> SymTensorField {
    pair.sharp(&SymFormField::differential(pair.chart(), f))
        .expect("same chart")
}

/// `[θ, θ]_s` via `[θ,θ]^{abc} = 2(θ^{ka}(∇_kθ)^{bc} + θ^{kb}(∇_kθ)^{ca} + θ^{kc}(∇_kθ)^{ab})`.
pub fn schouten_self(pair: &SymPoissonPair) -> Result<SymTensorField, GeometryError> {
    let n = pair.dim();
    let d = pair.nabla.covariant_derivative(&pair.theta)?;
    let th = &pair.theta;
    SymTensorField::from_fn(pair.chart(), 3, |abc| {
        let (a, b, c) = (abc[0], abc[1], abc[2]);
        let mut terms = Vec::new();
        for k in 0..n {
            for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                let t = th.component(&[k, x]);
                let dt = d.component(k, &[y, z]);
                if t.is_const_zero() || dt.is_const_zero() {
                    continue;
                }
                terms.push(Expr::mul(t, dt));
            }
        }
        Expr::mul(&Expr::constant(2.0), &Expr::sum(terms))
    })
}

/// One-dimensional residual `½(f²)′ + 2f²h` for `θ = f ∂x⊗∂x`, `h = Γ¹₁₁`.
pub fn one_dim_residual(pair: &SymPoissonPair) -> Result<Expr, GeometryError> {
    if pair.dim() != 1 {
        return Err(GeometryError::InvalidDegree(
            "the one-dimensional residual needs a 1-dimensional chart".into(),
        ));
    }
    let f = pair.theta.component(&[0, 0]);
    let h = pair.nabla.gamma(0, 0, 0);
    let ff = Expr::mul(f, f);
    Ok(Expr::add(
        &Expr::mul(f, &f.diff(0)),
        &Expr::mul(&Expr::constant(2.0), &Expr::mul(&ff, h)),
    ))
}

/// The closed-form family `f² = λ e^{−4H}` with `h = H′`, as a pair on a
/// 1-dimensional chart. `big_h` is written in variable 0.
pub fn one_dim_family(
    chart: &Arc<Chart>,
    lambda: f64,
    big_h: &Expr,
) -> Result<SymPoissonPair, GeometryError> {
    if chart.dim() != 1 || !(lambda > 0.0) {
        return Err(GeometryError::InvalidDegree(
            "the family needs a 1-dimensional chart and λ > 0".into(),
        ));
    }
    let f = Expr::mul(
        &Expr::constant(lambda.sqrt()),
        &Expr::mul(&Expr::constant(-2.0), big_h).exp(),
    );
    let theta = SymTensorField::from_fn(chart, 2, |_| f.clone())?;
    let h = big_h.diff(0);
    let nabla = Connection::from_fn(chart, |_, _, _| h.clone()).torsion_free_part();
    SymPoissonPair::new(theta, nabla)
}

/// `[θ, θ]_s = 0` at the samples. One-dimensional pairs use the scalar
/// residual, which is a nonzero multiple of the only component.
pub fn is_symmetric_poisson(
    pair: &SymPoissonPair,
    sampling: &Sampling,
) -> Result<Verdict, GeometryError> {
    let pts = pair.chart().samples(sampling);
    if pair.dim() == 1 {
        let r = one_dim_residual(pair)?;
        return Ok(check_zero([&r], &pts, sampling.tol)?);
    }
    Ok(schouten_self(pair)?.check_zero_at(&pts, sampling.tol)?)
}

/// Agreement of [`schouten_self`] with the general trace formula.
pub fn schouten_self_crosscheck(
    pair: &SymPoissonPair,
    sampling: &Sampling,
) -> Result<Verdict, GeometryError> {
    let general = crate::geometry::schouten(&pair.nabla, &pair.theta, &pair.theta)?;
    let diff = general.sub(&schouten_self(pair)?)?;
    Ok(diff.check_zero(sampling)?)
}

/// `∇_{θ(dx^i)} θ` for each `i`.
pub fn strong_obstructions(pair: &SymPoissonPair) -> Result<Vec<SymTensorField>, GeometryError> {
    let d = pair.nabla.covariant_derivative(&pair.theta)?;
    (0..pair.dim())
        .map(|i| d.along(&pair.generator(i)))
        .collect()
}

/// Strong: `∇_{θ(dx^i)} θ = 0` for every `i`.
pub fn is_strong(pair: &SymPoissonPair, sampling: &Sampling) -> Result<Verdict, GeometryError> {
    let pts = pair.chart().samples(sampling);
    let mut v = Verdict::trivially_true(pts.len());
    for t in strong_obstructions(pair)? {
        v = v.and(t.check_zero_at(&pts, sampling.tol)?);
    }
    Ok(v)
}

/// Parallel: `∇θ = 0`.
pub fn is_parallel(pair: &SymPoissonPair, sampling: &Sampling) -> Result<Verdict, GeometryError> {
    let pts = pair.chart().samples(sampling);
    let d = pair.nabla.covariant_derivative(&pair.theta)?;
    Ok(check_zero(d.all_components(), &pts, sampling.tol)?)
}

/// `Jac(f,g,h) − [dh(⟨X_f,X_g⟩_s) + cyclic]`.
pub fn jacobiator_identity_check(
    pair: &SymPoissonPair,
    f: &Expr,
    g: &Expr,
    h: &Expr,
) -> Result<Expr, GeometryError> {
    let br = |a: &Expr, b: &Expr| poisson_bracket(pair, a, b);
    let jac = Expr::sum([br(f, &br(g, h)), br(g, &br(h, f)), br(h, &br(f, g))]);
    let (xf, xg, xh) = (gradient(pair, f), gradient(pair, g), gradient(pair, h));
    let rhs = Expr::sum([
        directional(&symmetric_bracket(&pair.nabla, &xf, &xg)?, h),
        directional(&symmetric_bracket(&pair.nabla, &xg, &xh)?, f),
        directional(&symmetric_bracket(&pair.nabla, &xh, &xf)?, g),
    ]);
    Ok(Expr::sub(&jac, &rhs))
}

/// `X_{{f,g}} − ⟨X_f, X_g⟩_s`.
pub fn strong_morphism_check(
    pair: &SymPoissonPair,
    f: &Expr,
    g: &Expr,
) -> Result<SymTensorField, GeometryError> {
    let lhs = gradient(pair, &poisson_bracket(pair, f, g));
    let rhs = symmetric_bracket(&pair.nabla, &gradient(pair, f), &gradient(pair, g))?;
    lhs.sub(&rhs)
}

/// `θ^{ij} Ric_{ij}`.
pub fn scalar_curvature(pair: &SymPoissonPair) -> Expr {
    let n = pair.dim();
    let r = pair.nabla.curvature();
    let mut terms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let t = pair.theta.component(&[i, j]);
            if t.is_const_zero() {
                continue;
            }
            terms.push(Expr::mul(t, &r.ricci(i, j)));
        }
    }
    Expr::sum(terms)
}

/// `θ^{ij} (∇df)_{ij}` with `(∇df)_{ij} = ∂_i∂_j f − Γ^k_{ij} ∂_k f`.
pub fn laplacian(pair: &SymPoissonPair, f: &Expr) -> Expr {
    let n = pair.dim();
    let df: Vec<Expr> = (0..n).map(|k| f.diff(k)).collect();
    let mut terms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let t = pair.theta.component(&[i, j]);
            if t.is_const_zero() {
                continue;
            }
            let hess = Expr::sub(
                &df[j].diff(i),
                &Expr::sum((0..n).map(|k| Expr::mul(pair.nabla.gamma(k, i, j), &df[k]))),
            );
            terms.push(Expr::mul(t, &hess));
        }
    }
    Expr::sum(terms)
}
