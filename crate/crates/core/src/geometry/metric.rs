//! Determinants, inverses, index raising/lowering and Levi-Civita.

use crate::expr::Expr;
use crate::sampling::Sampling;

use super::tensor::{decode, encode};
use super::{
    Connection, GeometryError, SymField, SymFormField, SymTensorField, TorsionFree, Variance,
};

fn det_minor(m: &[Vec<Expr>], rows: &[usize], cols: &[usize]) -> Expr {
    if rows.len() == 1 {
        return m[rows[0]][cols[0]].clone();
    }
    let r0 = rows[0];
    let sub_rows = &rows[1..];
    let mut terms = Vec::with_capacity(cols.len());
    for (pos, &c) in cols.iter().enumerate() {
        let entry = &m[r0][c];
        if entry.is_const_zero() {
            continue;
        }
        let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = det_minor(m, sub_rows, &sub_cols);
        let term = Expr::mul(entry, &minor);
        terms.push(if pos % 2 == 0 { term } else { Expr::neg(&term) });
    }
    Expr::sum(terms)
}

/// Symbolic determinant by cofactor expansion.
pub fn determinant(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    let idx: Vec<usize> = (0..n).collect();
    det_minor(m, &idx, &idx)
}

impl<V: Variance> SymField<V> {
    /// Component matrix of a degree-2 field.
    pub fn matrix(&self) -> Result<Vec<Vec<Expr>>, GeometryError> {
        if self.degree() != 2 {
            return Err(GeometryError::DegreeMismatch {
                left: self.degree(),
                right: 2,
            });
        }
        let n = self.dim();
        Ok((0..n)
            .map(|i| (0..n).map(|j| self.component(&[i, j]).clone()).collect())
            .collect())
    }

    /// Symbolic inverse of a degree-2 field (adjugate over determinant),
    /// after checking invertibility at the samples.
    pub fn inverse(&self, sampling: &Sampling) -> Result<SymField<V::Dual>, GeometryError> {
        let m = self.matrix()?;
        let n = m.len();
        let det = determinant(&m);
        for x in self.chart().samples(sampling) {
            let d = det.eval(&x)?;
            let size = m
                .iter()
                .flatten()
                .map(|e| e.eval(&x).map(f64::abs))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .fold(0.0, f64::max);
            if !(d.abs() > 1e-12 * size.powi(n as i32).max(f64::MIN_POSITIVE)) {
                return Err(GeometryError::Degenerate { point: x });
            }
        }
        let inv_det = Expr::div(&Expr::one(), &det);
        let all: Vec<usize> = (0..n).collect();
        SymField::from_fn(self.chart(), 2, |ij| {
            let (i, j) = (ij[0], ij[1]);
            // Cofactor of (j, i); the matrix is symmetric so this is the
            // (i, j) entry of the adjugate.
            let cof = if n == 1 {
                Expr::one()
            } else {
                let rows: Vec<usize> = all.iter().copied().filter(|&r| r != j).collect();
                let cols: Vec<usize> = all.iter().copied().filter(|&c| c != i).collect();
                let minor = det_minor(&m, &rows, &cols);
                if (i + j) % 2 == 0 {
                    minor
                } else {
                    Expr::neg(&minor)
                }
            };
            Expr::mul(&cof, &inv_det)
        })
    }

    /// Applies a degree-2 dual-variance field to every index:
    /// `out^{i…} = m^{i j} … T_{j…}`. With `m = g⁻¹` this raises a form,
    /// with `m = g` it lowers a multivector.
    pub fn transform_by(&self, m: &SymField<V::Dual>) -> Result<SymField<V::Dual>, GeometryError>
    where
        V::Dual: Variance<Dual = V>,
    {
        self.ensure_chart(m.chart())?;
        if m.degree() != 2 {
            return Err(GeometryError::DegreeMismatch {
                left: m.degree(),
                right: 2,
            });
        }
        let n = self.dim();
        let r = self.degree();
        let len = n.pow(r as u32);
        let mut inner = vec![0usize; r];
        SymField::from_fn(self.chart(), r, |idx| {
            Expr::sum((0..len).filter_map(|flat| {
                decode(flat, n, r, &mut inner);
                let t = self.comp_flat(encode(&inner, n));
                if t.is_const_zero() {
                    return None;
                }
                let mut term = t.clone();
                for s in 0..r {
                    let f = m.component(&[idx[s], inner[s]]);
                    if f.is_const_zero() {
                        return None;
                    }
                    term = Expr::mul(&term, f);
                }
                Some(term)
            }))
        })
    }
}

impl SymFormField {
    /// Raises every index with `g⁻¹`.
    pub fn raise(&self, g_inv: &SymTensorField) -> Result<SymTensorField, GeometryError> {
        self.transform_by(g_inv)
    }
}

impl SymTensorField {
    /// Lowers every index with `g`.
    pub fn lower(&self, g: &SymFormField) -> Result<SymFormField, GeometryError> {
        self.transform_by(g)
    }
}

/// Levi-Civita connection of a nondegenerate metric:
/// `Γ^k_{ij} = ½ g^{kl}(∂_i g_{lj} + ∂_j g_{li} − ∂_l g_{ij})`.
pub fn levi_civita(g: &SymFormField, sampling: &Sampling) -> Result<TorsionFree, GeometryError> {
    let g_inv = g.inverse(sampling)?;
    Ok(levi_civita_with_inverse(g, &g_inv))
}

/// Levi-Civita connection when the inverse metric is already known.
pub fn levi_civita_with_inverse(g: &SymFormField, g_inv: &SymTensorField) -> TorsionFree {
    let n = g.dim();
    let half = Expr::constant(0.5);
    let conn = Connection::from_fn(g.chart(), |k, i, j| {
        let terms = (0..n).filter_map(|l| {
            let gkl = g_inv.component(&[k, l]);
            if gkl.is_const_zero() {
                return None;
            }
            let bracket = Expr::sub(
                &Expr::add(&g.component(&[l, j]).diff(i), &g.component(&[l, i]).diff(j)),
                &g.component(&[i, j]).diff(l),
            );
            if bracket.is_const_zero() {
                return None;
            }
            Some(Expr::mul(gkl, &bracket))
        });
        Expr::mul(&half, &Expr::sum(terms))
    });
    // Symmetric in (i, j) by construction.
    conn.torsion_free_part()
}
