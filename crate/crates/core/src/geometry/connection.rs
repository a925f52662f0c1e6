use std::ops::Deref;
use std::sync::Arc;

use crate::expr::Expr;
use crate::sampling::{check_zero, Sampling, Verdict};

use super::tensor::{decode, encode};
use super::{Chart, GeometryError, SymField, SymTensorField, Variance};

/// An affine connection given by Christoffel symbols,
/// `∇_{∂i} ∂j = Γ^k_{ij} ∂k`.
#[derive(Debug, Clone)]
pub struct Connection {
    chart: Arc<Chart>,
    gamma: Vec<Expr>,
}

impl Connection {
    /// Builds from a generator `(k, i, j) ↦ Γ^k_{ij}`.
    pub fn from_fn<F>(chart: &Arc<Chart>, mut f: F) -> Connection
    where
        F: FnMut(usize, usize, usize) -> Expr,
    {
        let n = chart.dim();
        let mut gamma = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    gamma.push(f(k, i, j));
                }
            }
        }
        Connection {
            chart: Arc::clone(chart),
            gamma,
        }
    }

    /// The flat connection of the chart, `Γ = 0`.
    pub fn euclidean(chart: &Arc<Chart>) -> Connection {
        Connection::from_fn(chart, |_, _, _| Expr::zero())
    }

    /// Sets `Γ^k_{ij}` and, unless `i == j`, also `Γ^k_{ji}`.
    pub fn with_symmetric(
        mut self,
        k: usize,
        i: usize,
        j: usize,
        value: Expr,
    ) -> Result<Connection, GeometryError> {
        let n = self.dim();
        if k >= n || i >= n || j >= n {
            return Err(GeometryError::IndexOutOfRange {
                index: vec![k, i, j],
                dim: n,
                degree: 3,
            });
        }
        self.gamma[(k * n + i) * n + j] = value.clone();
        self.gamma[(k * n + j) * n + i] = value;
        Ok(self)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// `Γ^k_{ij}`.
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &Expr {
        let n = self.dim();
        &self.gamma[(k * n + i) * n + j]
    }

    /// Torsion components `T^k_{ij} = Γ^k_{ij} − Γ^k_{ji}`.
    pub fn torsion(&self) -> Vec<Expr> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out.push(Expr::sub(self.gamma(k, i, j), self.gamma(k, j, i)));
                }
            }
        }
        out
    }

    /// Sampled torsion check; on success the connection may be used by the
    /// symmetric Cartan calculus.
    pub fn torsion_free(self, sampling: &Sampling) -> Result<TorsionFree, GeometryError> {
        let pts = self.chart.samples(sampling);
        let v = check_zero(&self.torsion(), &pts, sampling.tol)?;
        if v.holds {
            Ok(TorsionFree(self))
        } else {
            Err(GeometryError::Torsion {
                residual: v.max_residual,
            })
        }
    }

    /// `∇⁰ = ∇ − ½T`, i.e. symmetrized Christoffel symbols.
    pub fn torsion_free_part(&self) -> TorsionFree {
        let half = Expr::constant(0.5);
        TorsionFree(Connection::from_fn(&self.chart, |k, i, j| {
            if i == j {
                self.gamma(k, i, j).clone()
            } else {
                Expr::mul(&half, &Expr::add(self.gamma(k, i, j), self.gamma(k, j, i)))
            }
        }))
    }

    /// Covariant derivative `∇T`, returned as its `n` directional parts
    /// `∇_{∂k} T`.
    pub fn covariant_derivative<V: Variance>(
        &self,
        t: &SymField<V>,
    ) -> Result<CovariantDerivative<V>, GeometryError> {
        t.ensure_chart(&self.chart)?;
        let n = self.dim();
        let r = t.degree();
        let mut parts = Vec::with_capacity(n);
        for k in 0..n {
            let mut moved = vec![0usize; r];
            let part = SymField::from_fn(&self.chart, r, |idx| {
                let mut terms = vec![t.component(idx).diff(k)];
                for s in 0..r {
                    moved.copy_from_slice(idx);
                    for m in 0..n {
                        moved[s] = m;
                        let g = if V::UPPER {
                            self.gamma(idx[s], k, m)
                        } else {
                            self.gamma(m, k, idx[s])
                        };
                        if g.is_const_zero() {
                            continue;
                        }
                        let term = Expr::mul(g, t.comp_flat(encode(&moved, n)));
                        terms.push(if V::UPPER { term } else { Expr::neg(&term) });
                    }
                }
                Expr::sum(terms)
            })?;
            parts.push(part);
        }
        Ok(CovariantDerivative { parts })
    }

    /// `∇_X T = X^k ∇_{∂k} T`.
    pub fn derivative_along<V: Variance>(
        &self,
        x: &SymTensorField,
        t: &SymField<V>,
    ) -> Result<SymField<V>, GeometryError> {
        self.covariant_derivative(t)?.along(x)
    }

    /// Curvature `R^l_{kij}` with `R(∂i, ∂j)∂k = R^l_{kij} ∂l`.
    pub fn curvature(&self) -> CurvatureField {
        let n = self.dim();
        let mut comps = Vec::with_capacity(n.pow(4));
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut terms = vec![
                            self.gamma(l, j, k).diff(i),
                            Expr::neg(&self.gamma(l, i, k).diff(j)),
                        ];
                        for m in 0..n {
                            terms.push(Expr::mul(self.gamma(l, i, m), self.gamma(m, j, k)));
                            terms.push(Expr::neg(&Expr::mul(
                                self.gamma(l, j, m),
                                self.gamma(m, i, k),
                            )));
                        }
                        comps.push(Expr::sum(terms));
                    }
                }
            }
        }
        CurvatureField {
            chart: Arc::clone(&self.chart),
            comps,
        }
    }

    /// Componentwise sampled comparison of two connections.
    pub fn compare(
        &self,
        other: &Connection,
        sampling: &Sampling,
    ) -> Result<Verdict, GeometryError> {
        if !super::tensor::same_chart(&self.chart, &other.chart) {
            return Err(GeometryError::ChartMismatch);
        }
        let diffs: Vec<Expr> = self
            .gamma
            .iter()
            .zip(&other.gamma)
            .map(|(a, b)| Expr::sub(a, b))
            .collect();
        let pts = self.chart.samples(sampling);
        Ok(check_zero(&diffs, &pts, sampling.tol)?)
    }
}

/// A connection that passed the sampled torsion check.
#[derive(Debug, Clone)]
pub struct TorsionFree(Connection);

impl TorsionFree {
    pub fn euclidean(chart: &Arc<Chart>) -> TorsionFree {
        TorsionFree(Connection::euclidean(chart))
    }

    pub fn connection(&self) -> &Connection {
        &self.0
    }

    pub fn into_inner(self) -> Connection {
        self.0
    }
}

impl Deref for TorsionFree {
    type Target = Connection;

    fn deref(&self) -> &Connection {
        &self.0
    }
}

/// `∇T` stored as the directional derivatives along coordinate fields.
#[derive(Debug, Clone)]
pub struct CovariantDerivative<V: Variance> {
    parts: Vec<SymField<V>>,
}

impl<V: Variance> CovariantDerivative<V> {
    /// `∇_{∂k} T`.
    pub fn part(&self, k: usize) -> &SymField<V> {
        &self.parts[k]
    }

    pub fn parts(&self) -> &[SymField<V>] {
        &self.parts
    }

    /// `∇_X T`.
    pub fn along(&self, x: &SymTensorField) -> Result<SymField<V>, GeometryError> {
        if x.degree() != 1 {
            return Err(GeometryError::DegreeMismatch {
                left: x.degree(),
                right: 1,
            });
        }
        let first = &self.parts[0];
        x.ensure_chart(first.chart())?;
        let mut acc = SymField::zero(first.chart(), first.degree())?;
        for (k, part) in self.parts.iter().enumerate() {
            let xk = x.component(&[k]);
            if xk.is_const_zero() {
                continue;
            }
            acc = acc.add(&part.scale(xk))?;
        }
        Ok(acc)
    }

    /// Component `(∇T)_{k; i…}`.
    pub fn component(&self, k: usize, idx: &[usize]) -> &Expr {
        self.parts[k].component(idx)
    }

    pub fn all_components(&self) -> impl Iterator<Item = &Expr> {
        self.parts.iter().flat_map(|p| p.components().iter())
    }
}

/// Curvature tensor `R^l_{kij}`.
#[derive(Debug, Clone)]
pub struct CurvatureField {
    chart: Arc<Chart>,
    comps: Vec<Expr>,
}

impl CurvatureField {
    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    /// `R^l_{kij}`.
    pub fn component(&self, l: usize, k: usize, i: usize, j: usize) -> &Expr {
        let n = self.chart.dim();
        &self.comps[((l * n + k) * n + i) * n + j]
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    /// Ricci contraction `Ric_{kj} = R^i_{kij}`.
    pub fn ricci(&self, k: usize, j: usize) -> Expr {
        let n = self.chart.dim();
        Expr::sum((0..n).map(|i| self.component(i, k, i, j).clone()))
    }

    /// `R(X, Y)Z` for vector fields.
    pub fn apply(
        &self,
        x: &SymTensorField,
        y: &SymTensorField,
        z: &SymTensorField,
    ) -> Result<SymTensorField, GeometryError> {
        for v in [x, y, z] {
            v.ensure_chart(&self.chart)?;
        }
        let n = self.chart.dim();
        let mut idx = [0usize; 3];
        let comps: Vec<Expr> = (0..n)
            .map(|l| {
                Expr::sum((0..n * n * n).filter_map(|flat| {
                    decode(flat, n, 3, &mut idx);
                    let [k, i, j] = idx;
                    let r = self.component(l, k, i, j);
                    if r.is_const_zero() {
                        return None;
                    }
                    Some(Expr::mul(
                        r,
                        &Expr::mul(
                            x.component(&[i]),
                            &Expr::mul(y.component(&[j]), z.component(&[k])),
                        ),
                    ))
                }))
            })
            .collect();
        SymTensorField::vector(&self.chart, comps)
    }

    /// `R(X, Y)η` on a 1-form: `(R(X,Y)η)_k = −η_l R^l_{kij} X^i Y^j`.
    pub fn apply_to_form(
        &self,
        x: &SymTensorField,
        y: &SymTensorField,
        eta: &super::SymFormField,
    ) -> Result<super::SymFormField, GeometryError> {
        let n = self.chart.dim();
        let comps: Vec<Expr> = (0..n)
            .map(|k| {
                let mut terms = Vec::new();
                for l in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            let r = self.component(l, k, i, j);
                            if r.is_const_zero() {
                                continue;
                            }
                            terms.push(Expr::mul(
                                r,
                                &Expr::mul(
                                    eta.component(&[l]),
                                    &Expr::mul(x.component(&[i]), y.component(&[j])),
                                ),
                            ));
                        }
                    }
                }
                Expr::neg(&Expr::sum(terms))
            })
            .collect();
        super::SymFormField::vector(&self.chart, comps)
    }
}
