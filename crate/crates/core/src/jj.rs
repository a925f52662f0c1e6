//! Commutative algebras with exact rational structure constants, the
//! Jacobi-Jordan and associativity tests, and the correspondence with
//! linear symmetric Poisson structures `θⁱʲ(x) = cᵏᵢⱼ xₖ` under the flat
//! connection.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact::{from_f64, int, rat, to_f64, Rat, RatMatrix};
use crate::expr::{EvalError, Expr};
use crate::geometry::{Chart, GeometryError, SymTensorField};
use crate::poisson::SymPoissonPair;
use crate::sampling::Sampling;

/// Largest denominator accepted when reading float coefficients back as rationals.
pub const MAX_DENOMINATOR: i64 = 10_000;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum JjError {
    #[error("expected {expected} structure constants, got {got}")]
    ConstantCount { expected: usize, got: usize },
    #[error("index ({k}, {i}, {j}) out of range for dimension {dim}")]
    IndexOutOfRange {
        k: usize,
        i: usize,
        j: usize,
        dim: usize,
    },
    #[error("structure constants are not symmetric at c^{k}_({i},{j})")]
    NotSymmetric { k: usize, i: usize, j: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension must be positive")]
    EmptyDimension,
    #[error("basis change matrix is singular")]
    SingularBasisChange,
    #[error("expected a degree-2 field, got degree {0}")]
    Degree(usize),
    #[error("component θ^({i},{j}) is not a homogeneous linear function")]
    NotLinear { i: usize, j: usize },
    #[error("coefficient {0} is not a rational with small denominator")]
    NotRational(f64),
    #[error("unknown catalog id `{0}`")]
    UnknownId(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// `eᵢ·eⱼ = cᵏᵢⱼ eₖ` with `cᵏᵢⱼ = cᵏⱼᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutativeAlgebra {
    dim: usize,
    c: Vec<Rat>,
}

impl CommutativeAlgebra {
    pub fn zero(dim: usize) -> CommutativeAlgebra {
        CommutativeAlgebra {
            dim,
            c: vec![Rat::zero(); dim * dim * dim],
        }
    }

    /// Constants in `c[(k·n + i)·n + j]` order.
    pub fn new(dim: usize, c: Vec<Rat>) -> Result<CommutativeAlgebra, JjError> {
        if dim == 0 {
            return Err(JjError::EmptyDimension);
        }
        if c.len() != dim * dim * dim {
            return Err(JjError::ConstantCount {
                expected: dim * dim * dim,
                got: c.len(),
            });
        }
        let alg = CommutativeAlgebra { dim, c };
        for k in 0..dim {
            for i in 0..dim {
                for j in i + 1..dim {
                    if alg.constant(k, i, j) != alg.constant(k, j, i) {
                        return Err(JjError::NotSymmetric { k, i, j });
                    }
                }
            }
        }
        Ok(alg)
    }

    /// Sets `cᵏᵢⱼ = cᵏⱼᵢ` for each `(k, i, j, value)`, zero-based.
    pub fn from_entries(
        dim: usize,
        entries: &[(usize, usize, usize, Rat)],
    ) -> Result<CommutativeAlgebra, JjError> {
        if dim == 0 {
            return Err(JjError::EmptyDimension);
        }
        let mut alg = CommutativeAlgebra::zero(dim);
        for (k, i, j, v) in entries {
            let (k, i, j) = (*k, *i, *j);
            if k >= dim || i >= dim || j >= dim {
                return Err(JjError::IndexOutOfRange { k, i, j, dim });
            }
            let idx = alg.at(k, i, j);
            alg.c[idx] = v.clone();
            let idx = alg.at(k, j, i);
            alg.c[idx] = v.clone();
        }
        Ok(alg)
    }

    /// Builds the constants from `f(k, i, j)` for `i ≤ j` and mirrors them.
    pub fn from_fn<F: FnMut(usize, usize, usize) -> Rat>(
        dim: usize,
        mut f: F,
    ) -> Result<CommutativeAlgebra, JjError> {
        if dim == 0 {
            return Err(JjError::EmptyDimension);
        }
        let mut alg = CommutativeAlgebra::zero(dim);
        for k in 0..dim {
            for i in 0..dim {
                for j in i..dim {
                    let v = f(k, i, j);
                    let idx = alg.at(k, j, i);
                    alg.c[idx] = v.clone();
                    let idx = alg.at(k, i, j);
                    alg.c[idx] = v;
                }
            }
        }
        Ok(alg)
    }

    fn at(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.dim + i) * self.dim + j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant(&self, k: usize, i: usize, j: usize) -> &Rat {
        &self.c[self.at(k, i, j)]
    }

    pub fn constants(&self) -> &[Rat] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    fn check_len(&self, v: usize) -> Result<(), JjError> {
        if v != self.dim {
            return Err(JjError::DimensionMismatch {
                expected: self.dim,
                got: v,
            });
        }
        Ok(())
    }

    /// `(u·v)ᵏ = cᵏᵢⱼuⁱvʲ`.
    pub fn product(&self, u: &[Rat], v: &[Rat]) -> Result<Vec<Rat>, JjError> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        Ok(self.mul(u, v))
    }

    /// [`product`](Self::product) in floating point.
    pub fn product_f64(&self, u: &[f64], v: &[f64]) -> Result<Vec<f64>, JjError> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        let n = self.dim;
        let mut out = vec![0.0; n];
        for (k, o) in out.iter_mut().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    let c = self.constant(k, i, j);
                    if !c.is_zero() {
                        *o += to_f64(c) * u[i] * v[j];
                    }
                }
            }
        }
        Ok(out)
    }

    fn mul(&self, u: &[Rat], v: &[Rat]) -> Vec<Rat> {
        let n = self.dim;
        let mut out = vec![Rat::zero(); n];
        for i in 0..n {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if v[j].is_zero() {
                    continue;
                }
                let uv = &u[i] * &v[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.constant(k, i, j);
                    if !c.is_zero() {
                        *o += c * &uv;
                    }
                }
            }
        }
        out
    }

    pub fn basis(&self, i: usize) -> Vec<Rat> {
        (0..self.dim)
            .map(|k| if k == i { Rat::one() } else { Rat::zero() })
            .collect()
    }

    /// `eᵢ·eⱼ`.
    pub fn basis_product(&self, i: usize, j: usize) -> Vec<Rat> {
        (0..self.dim)
            .map(|k| self.constant(k, i, j).clone())
            .collect()
    }

    /// `u·(v·w) + v·(w·u) + w·(u·v)`.
    pub fn jacobiator(&self, u: &[Rat], v: &[Rat], w: &[Rat]) -> Result<Vec<Rat>, JjError> {
        for x in [u, v, w] {
            self.check_len(x.len())?;
        }
        let a = self.mul(u, &self.mul(v, w));
        let b = self.mul(v, &self.mul(w, u));
        let c = self.mul(w, &self.mul(u, v));
        Ok(a.into_iter()
            .zip(b)
            .zip(c)
            .map(|((a, b), c)| a + b + c)
            .collect())
    }

    /// `(u·v)·w − u·(v·w)`.
    pub fn associator(&self, u: &[Rat], v: &[Rat], w: &[Rat]) -> Result<Vec<Rat>, JjError> {
        for x in [u, v, w] {
            self.check_len(x.len())?;
        }
        let left = self.mul(&self.mul(u, v), w);
        let right = self.mul(u, &self.mul(v, w));
        Ok(left.into_iter().zip(right).map(|(a, b)| a - b).collect())
    }

    fn triples(&self) -> impl Iterator<Item = (usize, usize, usize)> {
        let n = self.dim;
        (0..n).flat_map(move |i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
    }

    fn first_triple<F>(&self, mut bad: F) -> Option<(usize, usize, usize)>
    where
        F: FnMut(&[Rat], &[Rat], &[Rat]) -> bool,
    {
        self.triples()
            .find(|&(i, j, k)| bad(&self.basis(i), &self.basis(j), &self.basis(k)))
    }

    pub fn is_jacobi_jordan(&self) -> bool {
        self.first_triple(|u, v, w| {
            self.jacobiator(u, v, w)
                .map_or(true, |r| !r.iter().all(Zero::is_zero))
        })
        .is_none()
    }

    pub fn is_associative(&self) -> bool {
        self.associativity_witness().is_none()
    }

    /// First basis triple `(i, j, k)` with `(eᵢeⱼ)eₖ ≠ eᵢ(eⱼeₖ)`.
    pub fn associativity_witness(&self) -> Option<(usize, usize, usize)> {
        self.first_triple(|u, v, w| {
            self.associator(u, v, w)
                .map_or(true, |r| !r.iter().all(Zero::is_zero))
        })
    }

    /// `u·(v·w) = 0` for all `u, v, w`: the algebraic form of strongness,
    /// equivalent to Jacobi-Jordan together with associativity.
    pub fn has_vanishing_triple_products(&self) -> bool {
        self.first_triple(|u, v, w| !self.mul(u, &self.mul(v, w)).iter().all(Zero::is_zero))
            .is_none()
    }

    /// Constants in the basis `e'ₐ = Pⁱₐ eᵢ` (columns of `P`).
    pub fn basis_change(&self, p: &RatMatrix) -> Result<CommutativeAlgebra, JjError> {
        let n = self.dim;
        if p.rows() != n || p.cols() != n {
            return Err(JjError::DimensionMismatch {
                expected: n,
                got: p.rows().max(p.cols()),
            });
        }
        let q = p.inverse().ok_or(JjError::SingularBasisChange)?;
        CommutativeAlgebra::from_fn(n, |c, a, b| {
            let ea: Vec<Rat> = (0..n).map(|i| p.get(i, a).clone()).collect();
            let eb: Vec<Rat> = (0..n).map(|i| p.get(i, b).clone()).collect();
            let prod = self.mul(&ea, &eb);
            prod.iter()
                .enumerate()
                .fold(Rat::zero(), |acc, (k, v)| acc + q.get(c, k) * v)
        })
    }

    /// Matrix `Aⱼₖ = cᵏᵢⱼ` of the linear vector field `θ(dxⁱ)`, whose
    /// `j`-th component is `Aⱼₖ xₖ`.
    pub fn generator_matrix(&self, i: usize) -> RatMatrix {
        RatMatrix::from_fn(self.dim, self.dim, |j, k| self.constant(k, i, j).clone())
    }

    /// Lie bracket `[θ(dxᵃ), θ(dxᵇ)]` of two generators, again linear with
    /// matrix `BA − AB`.
    pub fn generator_bracket(&self, a: usize, b: usize) -> RatMatrix {
        let ma = self.generator_matrix(a);
        let mb = self.generator_matrix(b);
        mb.mul(&ma).sub(&ma.mul(&mb))
    }

    /// Coefficients `λ` with `m = Σ λᵢ Aᵢ` over the generator matrices, if
    /// `m` lies in their span. Not unique when the generators are dependent.
    pub fn in_generator_span(&self, m: &RatMatrix) -> Option<Vec<Rat>> {
        let n = self.dim;
        let gens: Vec<RatMatrix> = (0..n).map(|i| self.generator_matrix(i)).collect();
        let rows = n * n;
        let aug = RatMatrix::from_fn(rows, n + 1, |r, c| {
            let (j, k) = (r / n, r % n);
            if c < n {
                gens[c].get(j, k).clone()
            } else {
                m.get(j, k).clone()
            }
        });
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&n) {
            return None;
        }
        let mut out = vec![Rat::zero(); n];
        for (r, &c) in pivots.iter().enumerate() {
            out[c] = red.get(r, n).clone();
        }
        Some(out)
    }

    /// Nonzero constants `cᵏᵢⱼ` with `i ≤ j`, zero-based.
    pub fn nonzero_entries(&self) -> Vec<(usize, usize, usize, Rat)> {
        let n = self.dim;
        let mut out = Vec::new();
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let c = self.constant(k, i, j);
                    if !c.is_zero() {
                        out.push((k, i, j, c.clone()));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for CommutativeAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries = self.nonzero_entries();
        if entries.is_empty() {
            return write!(f, "zero algebra of dimension {}", self.dim);
        }
        let parts: Vec<String> = entries
            .iter()
            .map(|(k, i, j, c)| format!("e{}·e{} ∋ {} e{}", i + 1, j + 1, c, k + 1))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Coordinate names used for linear structures on `V*`.
pub fn chart_names(dim: usize) -> Vec<String> {
    let named: &[&str] = match dim {
        1 => &["x"],
        2 => &["x", "y"],
        3 => &["x", "y", "z"],
        4 => &["x", "y", "z", "t"],
        _ => &[],
    };
    if named.is_empty() {
        (1..=dim).map(|i| format!("x{i}")).collect()
    } else {
        named.iter().map(|s| s.to_string()).collect()
    }
}

pub fn linear_chart(dim: usize) -> Arc<Chart> {
    let n = dim.max(1);
    Arc::new(Chart::new(chart_names(n), vec![(-1.0, 1.0); n]).expect("valid chart"))
}

/// `θⁱʲ = cᵏᵢⱼ xₖ` on `chart`.
pub fn linear_theta(
    alg: &CommutativeAlgebra,
    chart: &Arc<Chart>,
) -> Result<SymTensorField, JjError> {
    if chart.dim() != alg.dim {
        return Err(JjError::DimensionMismatch {
            expected: alg.dim,
            got: chart.dim(),
        });
    }
    Ok(SymTensorField::from_fn(chart, 2, |ij| {
        Expr::sum((0..alg.dim).filter_map(|k| {
            let c = alg.constant(k, ij[0], ij[1]);
            (!c.is_zero()).then(|| Expr::var(k).scale(to_f64(c)))
        }))
    })?)
}

/// The linear pair on the standard chart of [`chart_names`] with the flat
/// connection.
pub fn to_linear_structure(alg: &CommutativeAlgebra) -> SymPoissonPair {
    let theta = linear_theta(alg, &linear_chart(alg.dim)).expect("chart matches");
    SymPoissonPair::euclidean(theta).expect("degree 2")
}

/// Reads `cᵏᵢⱼ = ∂ₖθⁱʲ` back from a linear field. Each component must be
/// homogeneous linear; this is checked at sample points well outside the
/// chart box.
pub fn from_linear_structure(theta: &SymTensorField) -> Result<CommutativeAlgebra, JjError> {
    if theta.degree() != 2 {
        return Err(JjError::Degree(theta.degree()));
    }
    let n = theta.dim();
    let probe = Sampling::default()
        .with_count(8)
        .points(&vec![(-3.0, 3.0); n]);
    let origin = vec![0.0; n];
    let mut c = vec![Rat::zero(); n * n * n];
    for i in 0..n {
        for j in i..n {
            let e = theta.component(&[i, j]);
            let grads: Vec<Expr> = (0..n).map(|k| e.diff(k)).collect();
            let coeff: Vec<f64> = grads
                .iter()
                .map(|g| g.eval(&origin))
                .collect::<Result<_, _>>()?;
            let scale = 1.0 + coeff.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for x in probe.iter().chain(std::iter::once(&origin)) {
                let lin: f64 = coeff.iter().zip(x).map(|(a, b)| a * b).sum();
                let v = e.eval(x)?;
                let mut bad = !((v - lin).abs() <= 1e-9 * scale * (1.0 + lin.abs()));
                for (k, g) in grads.iter().enumerate() {
                    bad |= !((g.eval(x)? - coeff[k]).abs() <= 1e-9 * scale);
                }
                if bad {
                    return Err(JjError::NotLinear { i, j });
                }
            }
            for (k, &a) in coeff.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let q = from_f64(a, MAX_DENOMINATOR, 1e-12 * (1.0 + a.abs()))
                    .ok_or(JjError::NotRational(a))?;
                c[(k * n + i) * n + j] = q.clone();
                c[(k * n + j) * n + i] = q;
            }
        }
    }
    CommutativeAlgebra::new(n, c)
}

/// Verdicts an entry is expected to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpectedVerdicts {
    pub jacobi_jordan: bool,
    pub associative: bool,
    pub symmetric_poisson: bool,
    pub strong: bool,
    pub involutive: bool,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: &'static str,
    /// The bivector in chart coordinates.
    pub theta: &'static str,
    pub algebra: CommutativeAlgebra,
    pub expected: ExpectedVerdicts,
}

const STRONG: ExpectedVerdicts = ExpectedVerdicts {
    jacobi_jordan: true,
    associative: true,
    symmetric_poisson: true,
    strong: true,
    involutive: true,
};

const NON_ASSOCIATIVE: ExpectedVerdicts = ExpectedVerdicts {
    jacobi_jordan: true,
    associative: false,
    symmetric_poisson: true,
    strong: false,
    involutive: true,
};

/// One-based `(k, i, j, value)` shorthand.
fn entry(
    id: &'static str,
    theta: &'static str,
    dim: usize,
    consts: &[(usize, usize, usize, Rat)],
    expected: ExpectedVerdicts,
) -> CatalogEntry {
    let zero_based: Vec<_> = consts
        .iter()
        .map(|(k, i, j, v)| (k - 1, i - 1, j - 1, v.clone()))
        .collect();
    CatalogEntry {
        id,
        theta,
        algebra: CommutativeAlgebra::from_entries(dim, &zero_based)
            .expect("catalog indices in range"),
        expected,
    }
}

/// The nontrivial linear structures in dimensions 2 to 4 (all strong), the
/// zero structure in dimension 4, and the five-dimensional non-associative
/// Jacobi-Jordan algebra.
pub fn catalog() -> Vec<CatalogEntry> {
    let one = int(1);
    vec![
        entry("dim2", "y ∂x⊗∂x", 2, &[(2, 1, 1, one.clone())], STRONG),
        entry("dim3_1", "z ∂x⊗∂x", 3, &[(3, 1, 1, one.clone())], STRONG),
        entry(
            "dim3_2",
            "z (∂x⊗∂x + ∂y⊗∂y)",
            3,
            &[(3, 1, 1, one.clone()), (3, 2, 2, one.clone())],
            STRONG,
        ),
        entry("dim4_1", "t ∂x⊗∂x", 4, &[(4, 1, 1, one.clone())], STRONG),
        entry(
            "dim4_2",
            "t (∂x⊗∂x + ∂y⊗∂y)",
            4,
            &[(4, 1, 1, one.clone()), (4, 2, 2, one.clone())],
            STRONG,
        ),
        entry(
            "dim4_3",
            "t ∂x⊗∂x + z ∂y⊗∂y",
            4,
            &[(4, 1, 1, one.clone()), (3, 2, 2, one.clone())],
            STRONG,
        ),
        entry(
            "dim4_4",
            "t ∂x⊗∂x + z ∂x⊙∂y",
            4,
            &[(4, 1, 1, one.clone()), (3, 1, 2, one.clone())],
            STRONG,
        ),
        entry(
            "dim4_5",
            "t (∂x⊗∂x + ∂y⊙∂z)",
            4,
            &[(4, 1, 1, one.clone()), (4, 2, 3, one.clone())],
            STRONG,
        ),
        entry("zero4", "0", 4, &[], STRONG),
        entry(
            "dim5_nonassoc",
            "x2 ∂x1⊗∂x1 + x5 ∂x1⊙∂x4 − ½x3 ∂x1⊙∂x5 + x3 ∂x2⊙∂x4",
            5,
            &[
                (2, 1, 1, one.clone()),
                (5, 1, 4, one.clone()),
                (3, 1, 5, rat(-1, 2)),
                (3, 2, 4, one),
            ],
            NON_ASSOCIATIVE,
        ),
    ]
}

pub fn catalog_ids() -> Vec<&'static str> {
    catalog().into_iter().map(|e| e.id).collect()
}

pub fn catalog_entry(id: &str) -> Result<CatalogEntry, JjError> {
    catalog()
        .into_iter()
        .find(|e| e.id == id)
        .ok_or_else(|| JjError::UnknownId(id.to_string()))
}
