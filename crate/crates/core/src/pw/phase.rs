use std::sync::Arc;

use nalgebra::DMatrix;

use crate::expr::{EvalError, Expr, ParseError};
use crate::geometry::{sorted_indices, Chart, Connection, SymTensorField};

use super::PwError;

/// A point `(x, p)` of `T*M` in natural coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CotangentState {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl CotangentState {
    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Result<CotangentState, PwError> {
        if x.len() != p.len() {
            return Err(PwError::StateDimension {
                expected: x.len(),
                got: p.len(),
            });
        }
        if x.iter().chain(&p).any(|v| !v.is_finite()) {
            return Err(PwError::NonFinite);
        }
        Ok(CotangentState { x, p })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `(x¹…xⁿ, p₁…pₙ)`, the evaluation point of a [`PhaseField`].
    pub fn coords(&self) -> Vec<f64> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.p);
        v
    }

    pub(crate) fn from_coords(y: &[f64]) -> CotangentState {
        let n = y.len() / 2;
        CotangentState {
            x: y[..n].to_vec(),
            p: y[n..].to_vec(),
        }
    }
}

/// A function on `T*M` over a base chart: an expression in `x¹…xⁿ`
/// (variables `0..n`) and `p₁…pₙ` (variables `n..2n`).
#[derive(Debug, Clone)]
pub struct PhaseField {
    base: Arc<Chart>,
    expr: Expr,
}

impl PhaseField {
    pub fn new(base: &Arc<Chart>, expr: Expr) -> Result<PhaseField, PwError> {
        let arity = 2 * base.dim();
        if let Some(v) = expr.max_var() {
            if v >= arity {
                return Err(PwError::VarOutOfRange { index: v, arity });
            }
        }
        Ok(PhaseField {
            base: base.clone(),
            expr,
        })
    }

    /// `pr*f` for a function on the base.
    pub fn pullback(base: &Arc<Chart>, f: &Expr) -> Result<PhaseField, PwError> {
        if let Some(v) = f.max_var() {
            if v >= base.dim() {
                return Err(PwError::VarOutOfRange {
                    index: v,
                    arity: base.dim(),
                });
            }
        }
        PhaseField::new(base, f.clone())
    }

    /// The momentum coordinate `pᵢ`.
    pub fn momentum(base: &Arc<Chart>, i: usize) -> PhaseField {
        PhaseField {
            base: base.clone(),
            expr: Expr::var(base.dim() + i),
        }
    }

    /// Parses against the names of [`Chart::cotangent`].
    pub fn parse(base: &Arc<Chart>, text: &str) -> Result<PhaseField, ParseError> {
        let f = base.cotangent().parse(text)?;
        Ok(PhaseField {
            base: base.clone(),
            expr: f.into_expr(),
        })
    }

    pub fn base(&self) -> &Arc<Chart> {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn into_expr(self) -> Expr {
        self.expr
    }

    /// `∂F/∂xⁱ`
    pub fn dx(&self, i: usize) -> Expr {
        self.expr.diff(i)
    }

    /// `∂F/∂pᵢ`
    pub fn dp(&self, i: usize) -> Expr {
        self.expr.diff(self.dim() + i)
    }

    pub fn eval(&self, s: &CotangentState) -> Result<f64, EvalError> {
        self.expr.eval(&s.coords())
    }

    fn same_base(&self, other: &PhaseField) -> Result<(), PwError> {
        if Arc::ptr_eq(&self.base, &other.base) || *self.base == *other.base {
            Ok(())
        } else {
            Err(PwError::ChartMismatch)
        }
    }

    fn with_expr(&self, expr: Expr) -> PhaseField {
        PhaseField {
            base: self.base.clone(),
            expr,
        }
    }
}

/// A vector field on `T*M`: components along `∂ₓ…` then `∂ₚ…`.
#[derive(Debug, Clone)]
pub struct PhaseVector {
    base: Arc<Chart>,
    comps: Vec<Expr>,
}

impl PhaseVector {
    pub fn new(base: &Arc<Chart>, comps: Vec<Expr>) -> Result<PhaseVector, PwError> {
        if comps.len() != 2 * base.dim() {
            return Err(PwError::StateDimension {
                expected: 2 * base.dim(),
                got: comps.len(),
            });
        }
        Ok(PhaseVector {
            base: base.clone(),
            comps,
        })
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn x_part(&self, i: usize) -> &Expr {
        &self.comps[i]
    }

    pub fn p_part(&self, j: usize) -> &Expr {
        &self.comps[self.base.dim() + j]
    }

    pub fn eval(&self, s: &CotangentState) -> Result<Vec<f64>, EvalError> {
        let y = s.coords();
        self.comps.iter().map(|c| c.eval(&y)).collect()
    }

    /// Horizontal part in the splitting of `∇`: the horizontal lift of the
    /// `∂ₓ` part, `wⁱ(∂ₓᵢ + pₖΓᵏᵢⱼ∂ₚⱼ)`.
    pub fn horizontal_part(&self, nabla: &Connection) -> PhaseVector {
        let n = self.base.dim();
        let mut comps: Vec<Expr> = self.comps[..n].to_vec();
        for j in 0..n {
            let mut terms = Vec::new();
            for i in 0..n {
                for k in 0..n {
                    let g = nabla.gamma(k, i, j);
                    if !g.is_const_zero() && !self.comps[i].is_const_zero() {
                        terms.push(Expr::mul(&Expr::var(n + k), &Expr::mul(g, &self.comps[i])));
                    }
                }
            }
            comps.push(Expr::sum(terms));
        }
        PhaseVector {
            base: self.base.clone(),
            comps,
        }
    }

    pub fn vertical_part(&self, nabla: &Connection) -> PhaseVector {
        let h = self.horizontal_part(nabla);
        self.combine(&h, Expr::sub)
    }

    pub fn add(&self, other: &PhaseVector) -> PhaseVector {
        self.combine(other, Expr::add)
    }

    pub fn sub(&self, other: &PhaseVector) -> PhaseVector {
        self.combine(other, Expr::sub)
    }

    fn combine(&self, other: &PhaseVector, op: fn(&Expr, &Expr) -> Expr) -> PhaseVector {
        PhaseVector {
            base: self.base.clone(),
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| op(a, b))
                .collect(),
        }
    }
}

/// `g_∇ = dpⱼ⊙dxʲ − pₖΓᵏᵢⱼ dxⁱ⊙dxʲ` as a `2n×2n` matrix in `(x, p)` order.
pub fn pw_metric_matrix(nabla: &Connection, s: &CotangentState) -> Result<DMatrix<f64>, EvalError> {
    let n = nabla.dim();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = 1.0;
        m[(n + i, i)] = 1.0;
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += s.p[k] * nabla.gamma(k, i, j).eval(&s.x)?;
            }
            m[(i, j)] = -2.0 * acc;
        }
    }
    Ok(m)
}

/// `2pₖΓᵏᵢⱼ aᵢ bⱼ` summed over `i, j, k`.
fn christoffel_pairing(nabla: &Connection, a: &[Expr], b: &[Expr]) -> Expr {
    let n = nabla.dim();
    let mut terms = Vec::new();
    for i in 0..n {
        if a[i].is_const_zero() {
            continue;
        }
        for j in 0..n {
            if b[j].is_const_zero() {
                continue;
            }
            for k in 0..n {
                let g = nabla.gamma(k, i, j);
                if g.is_const_zero() {
                    continue;
                }
                terms.push(Expr::mul(
                    &Expr::mul(&Expr::var(n + k), g),
                    &Expr::mul(&a[i], &b[j]),
                ));
            }
        }
    }
    Expr::mul(&Expr::constant(2.0), &Expr::sum(terms))
}

/// `{F,G}_∇ = F_{xⁱ}G_{pᵢ} + F_{pᵢ}G_{xⁱ} + 2pₖΓᵏᵢⱼF_{pᵢ}G_{pⱼ}`.
pub fn pw_bracket(
    nabla: &Connection,
    f: &PhaseField,
    g: &PhaseField,
) -> Result<PhaseField, PwError> {
    f.same_base(g)?;
    if **nabla.chart() != **f.base() {
        return Err(PwError::ChartMismatch);
    }
    let n = f.dim();
    let fp: Vec<Expr> = (0..n).map(|i| f.dp(i)).collect();
    let gp: Vec<Expr> = (0..n).map(|i| g.dp(i)).collect();
    let mut terms: Vec<Expr> = (0..n)
        .flat_map(|i| [Expr::mul(&f.dx(i), &gp[i]), Expr::mul(&fp[i], &g.dx(i))])
        .collect();
    terms.push(christoffel_pairing(nabla, &fp, &gp));
    Ok(f.with_expr(Expr::sum(terms)))
}

/// `{F,G}_can = F_{xⁱ}G_{pᵢ} − G_{xⁱ}F_{pᵢ}`.
pub fn canonical_bracket(f: &PhaseField, g: &PhaseField) -> Result<PhaseField, PwError> {
    f.same_base(g)?;
    let n = f.dim();
    let terms = (0..n).map(|i| {
        Expr::sub(
            &Expr::mul(&f.dx(i), &g.dp(i)),
            &Expr::mul(&g.dx(i), &f.dp(i)),
        )
    });
    Ok(f.with_expr(Expr::sum(terms)))
}

/// `𝒳ᵛ(ζ) = (1/r!) 𝒳(ζ,…,ζ)`, a homogeneous polynomial of degree `r` in `p`.
pub fn vertical_lift(a: &SymTensorField) -> PhaseField {
    let n = a.dim();
    let r = a.degree();
    let mut terms = Vec::new();
    for idx in sorted_indices(n, r) {
        let c = a.component(&idx);
        if c.is_const_zero() {
            continue;
        }
        // (1/r!)·(r!/Π mᵢ!) = 1/Π mᵢ!
        let mut denom = 1.0;
        let mut run = 1.0;
        let mut mono = c.clone();
        for (s, &i) in idx.iter().enumerate() {
            if s > 0 && idx[s - 1] == i {
                run += 1.0;
                denom *= run;
            } else {
                run = 1.0;
            }
            mono = Expr::mul(&mono, &Expr::var(n + i));
        }
        terms.push(Expr::mul(&Expr::constant(1.0 / denom), &mono));
    }
    PhaseField {
        base: a.chart().clone(),
        expr: Expr::sum(terms),
    }
}

/// `grad_∇H = H_{pᵢ}∂ₓᵢ + (H_{xʲ} + 2pₖΓᵏᵢⱼH_{pᵢ})∂ₚⱼ`.
pub fn pw_gradient(nabla: &Connection, h: &PhaseField) -> PhaseVector {
    let n = h.dim();
    let hp: Vec<Expr> = (0..n).map(|i| h.dp(i)).collect();
    let mut comps = hp.clone();
    for j in 0..n {
        let mut unit = vec![Expr::zero(); n];
        unit[j] = Expr::one();
        comps.push(Expr::add(&h.dx(j), &christoffel_pairing(nabla, &hp, &unit)));
    }
    PhaseVector {
        base: h.base().clone(),
        comps,
    }
}

/// `Ham H = −H_{pᵢ}∂ₓᵢ + H_{xʲ}∂ₚⱼ`, the sign for which
/// `grad_∇H = pr_𝒱 Ham H − pr_ℋ Ham H`.
pub fn hamiltonian_vector_field(h: &PhaseField) -> PhaseVector {
    let n = h.dim();
    let comps = (0..n)
        .map(|i| Expr::neg(&h.dp(i)))
        .chain((0..n).map(|j| h.dx(j)))
        .collect();
    PhaseVector {
        base: h.base().clone(),
        comps,
    }
}
