//! Killing tensors through the symmetric Schouten bracket, the derived
//! bracket identity, and the cotangent bracket of a symmetric Poisson pair.

use crate::expr::Expr;
use crate::geometry::{
    directional, lie_bracket, schouten, symmetric_derivative, GeometryError, SymField,
    SymFormField, SymTensorField, TorsionFree,
};
use crate::poisson::SymPoissonPair;
use crate::sampling::{Sampling, Verdict};

/// Largest multivector degree accepted by [`derived_bracket_check`].
pub const DERIVED_BRACKET_MAX_DEGREE: usize = 3;

/// Killing test for `K` via `[g⁻¹, g⁻¹(K)]_s = 0` with the Levi-Civita
/// connection of `g`.
pub fn killing_via_schouten(
    g: &SymFormField,
    k: &SymFormField,
    sampling: &Sampling,
) -> Result<Verdict, GeometryError> {
    let g_inv = g.inverse(sampling)?;
    let lc = crate::geometry::levi_civita_with_inverse(g, &g_inv);
    let raised = k.raise(&g_inv)?;
    Ok(schouten(&lc, &g_inv, &raised)?.check_zero(sampling)?)
}

/// `ι_𝒳 φ`, with `None` standing for the zero form when `deg 𝒳 > deg φ`.
fn iota(
    x: &SymTensorField,
    phi: Option<SymFormField>,
) -> Result<Option<SymFormField>, GeometryError> {
    let Some(phi) = phi else { return Ok(None) };
    if x.degree() == 0 {
        return Ok(Some(phi.scale(x.component(&[]))));
    }
    if x.degree() > phi.degree() {
        return Ok(None);
    }
    phi.contract_multivector(x).map(Some)
}

fn sym_d(
    nabla: &TorsionFree,
    phi: Option<SymFormField>,
) -> Result<Option<SymFormField>, GeometryError> {
    phi.map(|p| symmetric_derivative(nabla, &p)).transpose()
}

fn accumulate(
    acc: Option<SymFormField>,
    term: Option<SymFormField>,
    negate: bool,
) -> Result<Option<SymFormField>, GeometryError> {
    let term = if negate { term.map(|t| t.neg()) } else { term };
    match (acc, term) {
        (Some(a), Some(t)) => a.add(&t).map(Some),
        (a, None) => Ok(a),
        (None, t) => Ok(t),
    }
}

/// `[[ι_𝒳, ∇ˢ], ι_𝒴]φ − ι_{[𝒳,𝒴]_s}φ`, both sides applied to `φ`.
///
/// The left side expands to
/// `ι_𝒳∇ˢι_𝒴φ − ∇ˢι_𝒳ι_𝒴φ − ι_𝒴ι_𝒳∇ˢφ + ι_𝒴∇ˢι_𝒳φ`.
/// When every term vanishes for degree reasons the residual is the zero
/// function.
pub fn derived_bracket_check(
    nabla: &TorsionFree,
    x: &SymTensorField,
    y: &SymTensorField,
    phi: &SymFormField,
) -> Result<SymFormField, GeometryError> {
    for v in [x, y] {
        if v.degree() > DERIVED_BRACKET_MAX_DEGREE {
            return Err(GeometryError::DegreeOverflow {
                degree: v.degree(),
                cap: DERIVED_BRACKET_MAX_DEGREE,
            });
        }
    }
    let phi = Some(phi.clone());
    let t1 = iota(x, sym_d(nabla, iota(y, phi.clone())?)?)?;
    let t2 = sym_d(nabla, iota(x, iota(y, phi.clone())?)?)?;
    let t3 = iota(y, iota(x, sym_d(nabla, phi.clone())?)?)?;
    let t4 = iota(y, sym_d(nabla, iota(x, phi.clone())?)?)?;
    let mut lhs = accumulate(None, t1, false)?;
    lhs = accumulate(lhs, t2, true)?;
    lhs = accumulate(lhs, t3, true)?;
    lhs = accumulate(lhs, t4, false)?;

    // The bracket of two functions is zero.
    let rhs = if x.degree() + y.degree() == 0 {
        None
    } else {
        iota(&schouten(nabla, x, y)?, phi)?
    };
    let residual = accumulate(lhs, rhs, true)?;
    match residual {
        Some(r) => Ok(r),
        None => SymField::zero(x.chart(), 0),
    }
}

fn ensure_one_form(alpha: &SymFormField) -> Result<(), GeometryError> {
    if alpha.degree() != 1 {
        return Err(GeometryError::DegreeMismatch {
            left: alpha.degree(),
            right: 1,
        });
    }
    Ok(())
}

/// `[α, β] = ∇_{θα}β − ∇_{θβ}α`.
pub fn cotangent_bracket(
    pair: &SymPoissonPair,
    alpha: &SymFormField,
    beta: &SymFormField,
) -> Result<SymFormField, GeometryError> {
    ensure_one_form(alpha)?;
    ensure_one_form(beta)?;
    let nabla = pair.nabla();
    nabla
        .derivative_along(&pair.sharp(alpha)?, beta)?
        .sub(&nabla.derivative_along(&pair.sharp(beta)?, alpha)?)
}

/// `[α, β] + [β, α]`.
pub fn antisymmetry_residual(
    pair: &SymPoissonPair,
    alpha: &SymFormField,
    beta: &SymFormField,
) -> Result<SymFormField, GeometryError> {
    cotangent_bracket(pair, alpha, beta)?.add(&cotangent_bracket(pair, beta, alpha)?)
}

/// `[α, fβ] − (θ(α)f)β − f[α, β]`.
pub fn leibniz_residual(
    pair: &SymPoissonPair,
    alpha: &SymFormField,
    beta: &SymFormField,
    f: &Expr,
) -> Result<SymFormField, GeometryError> {
    let lhs = cotangent_bracket(pair, alpha, &beta.scale(f))?;
    let anchor_f = directional(&pair.sharp(alpha)?, f);
    lhs.sub(&beta.scale(&anchor_f))?
        .sub(&cotangent_bracket(pair, alpha, beta)?.scale(f))
}

/// `θ[α, β] − [θα, θβ]`.
pub fn anchor_residual(
    pair: &SymPoissonPair,
    alpha: &SymFormField,
    beta: &SymFormField,
) -> Result<SymTensorField, GeometryError> {
    let lhs = pair.sharp(&cotangent_bracket(pair, alpha, beta)?)?;
    lhs.sub(&lie_bracket(&pair.sharp(alpha)?, &pair.sharp(beta)?)?)
}

/// `[α, [β, η]] + [β, [η, α]] + [η, [α, β]]`.
pub fn jacobi_residual(
    pair: &SymPoissonPair,
    alpha: &SymFormField,
    beta: &SymFormField,
    eta: &SymFormField,
) -> Result<SymFormField, GeometryError> {
    let br = |a: &SymFormField, b: &SymFormField| cotangent_bracket(pair, a, b);
    br(alpha, &br(beta, eta)?)?
        .add(&br(beta, &br(eta, alpha)?)?)?
        .add(&br(eta, &br(alpha, beta)?)?)
}

/// `R(θα, θβ)η + R(θβ, θη)α + R(θη, θα)β`.
pub fn bianchi_residual(
    pair: &SymPoissonPair,
    alpha: &SymFormField,
    beta: &SymFormField,
    eta: &SymFormField,
) -> Result<SymFormField, GeometryError> {
    for f in [alpha, beta, eta] {
        ensure_one_form(f)?;
    }
    let curv = pair.nabla().curvature();
    let (a, b, e) = (pair.sharp(alpha)?, pair.sharp(beta)?, pair.sharp(eta)?);
    curv.apply_to_form(&a, &b, eta)?
        .add(&curv.apply_to_form(&b, &e, alpha)?)?
        .add(&curv.apply_to_form(&e, &a, beta)?)
}

/// Sampled verdicts of the bracket axioms on one triple of forms.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomVerdicts {
    pub antisymmetry: Verdict,
    pub leibniz: Verdict,
    pub anchor: Verdict,
    pub jacobi: Verdict,
    pub bianchi: Verdict,
}

impl AxiomVerdicts {
    /// Antisymmetry and Leibniz, which hold for every pair.
    pub fn almost_lie(&self) -> bool {
        self.antisymmetry.holds && self.leibniz.holds
    }

    pub fn lie(&self) -> bool {
        self.almost_lie() && self.anchor.holds && self.jacobi.holds
    }
}

/// Runs every axiom check on `(α, β, η)` with test function `f`.
pub fn check_axioms(
    pair: &SymPoissonPair,
    forms: [&SymFormField; 3],
    f: &Expr,
    sampling: &Sampling,
) -> Result<AxiomVerdicts, GeometryError> {
    let [alpha, beta, eta] = forms;
    Ok(AxiomVerdicts {
        antisymmetry: antisymmetry_residual(pair, alpha, beta)?.check_zero(sampling)?,
        leibniz: leibniz_residual(pair, alpha, beta, f)?.check_zero(sampling)?,
        anchor: anchor_residual(pair, alpha, beta)?.check_zero(sampling)?,
        jacobi: jacobi_residual(pair, alpha, beta, eta)?.check_zero(sampling)?,
        bianchi: bianchi_residual(pair, alpha, beta, eta)?.check_zero(sampling)?,
    })
}
