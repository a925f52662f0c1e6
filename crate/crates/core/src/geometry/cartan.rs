//! Symmetric Cartan calculus over a torsion-free connection.

use crate::expr::Expr;
use crate::sampling::{Sampling, Verdict};

use super::tensor::encode;
use super::{GeometryError, SymField, SymFormField, SymTensorField, TorsionFree};

/// `∇ˢφ = (r+1) sym(∇φ)`; in components the sum over which slot takes
/// the derivative index.
pub fn symmetric_derivative(
    nabla: &TorsionFree,
    phi: &SymFormField,
) -> Result<SymFormField, GeometryError> {
    let d = nabla.covariant_derivative(phi)?;
    let r = phi.degree();
    let mut rest = vec![0usize; r];
    SymField::from_fn(phi.chart(), r + 1, |idx| {
        Expr::sum((0..=r).map(|s| {
            let mut pos = 0;
            for (t, &i) in idx.iter().enumerate() {
                if t != s {
                    rest[pos] = i;
                    pos += 1;
                }
            }
            d.component(idx[s], &rest).clone()
        }))
    })
}

/// `⟨X, Y⟩_s = ∇_X Y + ∇_Y X`.
pub fn symmetric_bracket(
    nabla: &TorsionFree,
    x: &SymTensorField,
    y: &SymTensorField,
) -> Result<SymTensorField, GeometryError> {
    for v in [x, y] {
        if v.degree() != 1 {
            return Err(GeometryError::DegreeMismatch {
                left: v.degree(),
                right: 1,
            });
        }
    }
    nabla
        .derivative_along(x, y)?
        .add(&nabla.derivative_along(y, x)?)
}

/// `Lˢ_X φ = ι_X ∇ˢφ − ∇ˢ ι_X φ`.
pub fn symmetric_lie_derivative(
    nabla: &TorsionFree,
    x: &SymTensorField,
    phi: &SymFormField,
) -> Result<SymFormField, GeometryError> {
    let first = symmetric_derivative(nabla, phi)?.contract_vector(x)?;
    if phi.degree() == 0 {
        return Ok(first);
    }
    let second = symmetric_derivative(nabla, &phi.contract_vector(x)?)?;
    first.sub(&second)
}

/// Symmetric Schouten bracket by the trace formula
/// `Σ_k (ι_{dx^k} A) ⊙ ∇_{∂k} B + ∇_{∂k} A ⊙ (ι_{dx^k} B)`.
pub fn schouten(
    nabla: &TorsionFree,
    a: &SymTensorField,
    b: &SymTensorField,
) -> Result<SymTensorField, GeometryError> {
    a.ensure_chart(nabla.chart())?;
    b.ensure_chart(nabla.chart())?;
    let (r, l) = (a.degree(), b.degree());
    if r + l == 0 {
        return Err(GeometryError::InvalidDegree(
            "Schouten bracket of two functions is undefined".into(),
        ));
    }
    let chart = nabla.chart();
    let da = nabla.covariant_derivative(a)?;
    let db = nabla.covariant_derivative(b)?;
    let mut acc = SymTensorField::zero(chart, r + l - 1)?;
    for k in 0..chart.dim() {
        let dxk = SymFormField::coordinate_form(chart, k);
        if r > 0 {
            acc = acc.add(&a.contract(&dxk)?.sym_product(db.part(k))?)?;
        }
        if l > 0 {
            acc = acc.add(&da.part(k).sym_product(&b.contract(&dxk)?)?)?;
        }
    }
    Ok(acc)
}

/// Anticommutative Schouten bracket of symmetric multivectors, extending
/// the Lie bracket of vector fields as a biderivation:
/// `Σ_k (ι_{dx^k} A) ⊙ ∂_k B − (ι_{dx^k} B) ⊙ ∂_k A`.
pub fn anticommutative_schouten(
    a: &SymTensorField,
    b: &SymTensorField,
) -> Result<SymTensorField, GeometryError> {
    a.ensure_chart(b.chart())?;
    let (r, l) = (a.degree(), b.degree());
    if r + l == 0 {
        return Err(GeometryError::InvalidDegree(
            "Schouten bracket of two functions is undefined".into(),
        ));
    }
    let chart = a.chart();
    let mut acc = SymTensorField::zero(chart, r + l - 1)?;
    for k in 0..chart.dim() {
        let dxk = SymFormField::coordinate_form(chart, k);
        if r > 0 {
            acc = acc.add(&a.contract(&dxk)?.sym_product(&b.partial(k))?)?;
        }
        if l > 0 {
            acc = acc.sub(&b.contract(&dxk)?.sym_product(&a.partial(k))?)?;
        }
    }
    Ok(acc)
}

/// Lie bracket of vector fields.
pub fn lie_bracket(
    x: &SymTensorField,
    y: &SymTensorField,
) -> Result<SymTensorField, GeometryError> {
    for v in [x, y] {
        if v.degree() != 1 {
            return Err(GeometryError::DegreeMismatch {
                left: v.degree(),
                right: 1,
            });
        }
    }
    anticommutative_schouten(x, y)
}

/// Killing test: `∇ˢφ` vanishes at the samples.
pub fn is_killing(
    nabla: &TorsionFree,
    phi: &SymFormField,
    sampling: &Sampling,
) -> Result<Verdict, GeometryError> {
    Ok(symmetric_derivative(nabla, phi)?.check_zero(sampling)?)
}

/// Applies a vector field to a function.
pub fn directional(x: &SymTensorField, f: &Expr) -> Expr {
    Expr::sum((0..x.dim()).map(|k| Expr::mul(x.component(&[k]), &f.diff(k))))
}

/// Pairing of a 1-form and a vector field.
pub fn pairing(alpha: &SymFormField, x: &SymTensorField) -> Expr {
    let n = x.dim();
    Expr::sum((0..n).map(|k| {
        Expr::mul(
            alpha.comp_flat(encode(&[k], n)),
            x.comp_flat(encode(&[k], n)),
        )
    }))
}
