//! Left-invariant symmetric Poisson structures on Lie groups, computed from
//! structure constants in a left-invariant frame `X₁ … Xₙ` with dual coframe
//! `ε¹ … εⁿ`. Everything is exact over the rationals except the flow of a
//! left-invariant field on the unit quaternions.
//!
//! Conventions: `[Xᵢ, Xⱼ] = cᵏᵢⱼ Xₖ`, `∇_{Xᵢ}Xⱼ = Aᵏᵢⱼ Xₖ`, and
//! `R(Xᵢ, Xⱼ)Xₖ = Rˡₖᵢⱼ Xₗ`.

use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact::{int, rat, to_f64, Rat, RatMatrix};
use crate::expr::Expr;
use crate::geometry::{Chart, Connection, GeometryError, SymTensorField, TorsionFree, MAX_DEGREE};
use crate::sampling::Sampling;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LieError {
    #[error("dimension must be positive")]
    EmptyDimension,
    #[error("expected {expected} coefficients, got {got}")]
    ConstantCount { expected: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index out of range for dimension {dim}")]
    IndexOutOfRange { dim: usize },
    #[error("structure constants are not antisymmetric at c^{k}_({i},{j})")]
    NotAntisymmetric { k: usize, i: usize, j: usize },
    #[error("Jacobi identity fails on (X{i}, X{j}, X{k})", i = .0 + 1, j = .1 + 1, k = .2 + 1)]
    Jacobi(usize, usize, usize),
    #[error("components are not symmetric")]
    NotSymmetric,
    #[error("degree {degree} exceeds the supported cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },
    #[error("connection has torsion at T^{k}_({i},{j})")]
    Torsion { k: usize, i: usize, j: usize },
    #[error("basis change matrix is singular")]
    SingularBasisChange,
    #[error("initial point has norm {0}, expected 1")]
    NotUnit(f64),
    #[error("flow parameters must be finite")]
    NonFinite,
    #[error("unknown algebra id `{0}`")]
    UnknownId(String),
    #[error("no polynomial frame is available for `{0}`")]
    NoFrame(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn cube(n: usize) -> usize {
    n * n * n
}

/// `[Xᵢ, Xⱼ] = cᵏᵢⱼ Xₖ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieAlgebra {
    dim: usize,
    c: Vec<Rat>,
}

impl LieAlgebra {
    pub fn abelian(dim: usize) -> Result<LieAlgebra, LieError> {
        if dim == 0 {
            return Err(LieError::EmptyDimension);
        }
        Ok(LieAlgebra {
            dim,
            c: vec![Rat::zero(); cube(dim)],
        })
    }

    /// Constants in `c[(k·n + i)·n + j]` order; antisymmetry and the Jacobi
    /// identity are checked exactly.
    pub fn new(dim: usize, c: Vec<Rat>) -> Result<LieAlgebra, LieError> {
        if dim == 0 {
            return Err(LieError::EmptyDimension);
        }
        if c.len() != cube(dim) {
            return Err(LieError::ConstantCount {
                expected: cube(dim),
                got: c.len(),
            });
        }
        let alg = LieAlgebra { dim, c };
        for k in 0..dim {
            for i in 0..dim {
                for j in i..dim {
                    if *alg.constant(k, i, j) != -alg.constant(k, j, i) {
                        return Err(LieError::NotAntisymmetric { k, i, j });
                    }
                }
            }
        }
        if let Some((i, j, k)) = alg.jacobi_failure() {
            return Err(LieError::Jacobi(i, j, k));
        }
        Ok(alg)
    }

    /// Sets `[Xᵢ, Xⱼ] ∋ v Xₖ` and the antisymmetric partner for each
    /// `(i, j, k, v)`, zero-based.
    pub fn from_brackets(
        dim: usize,
        brackets: &[(usize, usize, usize, Rat)],
    ) -> Result<LieAlgebra, LieError> {
        if dim == 0 {
            return Err(LieError::EmptyDimension);
        }
        let n = dim;
        let mut c = vec![Rat::zero(); cube(n)];
        for (i, j, k, v) in brackets {
            let (i, j, k) = (*i, *j, *k);
            if i >= n || j >= n || k >= n {
                return Err(LieError::IndexOutOfRange { dim });
            }
            c[(k * n + i) * n + j] = v.clone();
            c[(k * n + j) * n + i] = -v.clone();
        }
        LieAlgebra::new(dim, c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant(&self, k: usize, i: usize, j: usize) -> &Rat {
        &self.c[(k * self.dim + i) * self.dim + j]
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    /// `[u, v]` for coefficient vectors in the frame.
    pub fn bracket(&self, u: &[Rat], v: &[Rat]) -> Vec<Rat> {
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

    fn jacobi_failure(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (x, y, z) = (self.basis(i), self.basis(j), self.basis(k));
                    let a = self.bracket(&x, &self.bracket(&y, &z));
                    let b = self.bracket(&y, &self.bracket(&z, &x));
                    let c = self.bracket(&z, &self.bracket(&x, &y));
                    if (0..n).any(|m| !(&a[m] + &b[m] + &c[m]).is_zero()) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    /// `(ad Xᵢ)ᵏₘ = cᵏᵢₘ`.
    pub fn ad(&self, i: usize) -> RatMatrix {
        RatMatrix::from_fn(self.dim, self.dim, |k, m| self.constant(k, i, m).clone())
    }

    /// `B(Xᵢ, Xⱼ) = tr(ad Xᵢ ∘ ad Xⱼ)`.
    pub fn killing_form(&self) -> RatMatrix {
        let ads: Vec<RatMatrix> = (0..self.dim).map(|i| self.ad(i)).collect();
        RatMatrix::from_fn(self.dim, self.dim, |i, j| {
            let p = ads[i].mul(&ads[j]);
            (0..self.dim).fold(Rat::zero(), |acc, k| acc + p.get(k, k))
        })
    }

    /// Constants in the frame `X'ₐ = Pⁱₐ Xᵢ` (columns of `P`).
    pub fn basis_change(&self, p: &RatMatrix) -> Result<LieAlgebra, LieError> {
        let n = self.dim;
        if p.rows() != n || p.cols() != n {
            return Err(LieError::DimensionMismatch {
                expected: n,
                got: p.rows().max(p.cols()),
            });
        }
        let q = p.inverse().ok_or(LieError::SingularBasisChange)?;
        let col = |a: usize| -> Vec<Rat> { (0..n).map(|i| p.get(i, a).clone()).collect() };
        let mut c = vec![Rat::zero(); cube(n)];
        for a in 0..n {
            for b in 0..n {
                let br = self.bracket(&col(a), &col(b));
                for k in 0..n {
                    c[(k * n + a) * n + b] =
                        (0..n).fold(Rat::zero(), |acc, m| acc + q.get(k, m) * &br[m]);
                }
            }
        }
        LieAlgebra::new(n, c)
    }

    /// `𝔤 ⊕ 𝔥` with the frame of `𝔤` first.
    pub fn direct_sum(&self, other: &LieAlgebra) -> LieAlgebra {
        let (n1, n2) = (self.dim, other.dim);
        let n = n1 + n2;
        let mut c = vec![Rat::zero(); cube(n)];
        for k in 0..n1 {
            for i in 0..n1 {
                for j in 0..n1 {
                    c[(k * n + i) * n + j] = self.constant(k, i, j).clone();
                }
            }
        }
        for k in 0..n2 {
            for i in 0..n2 {
                for j in 0..n2 {
                    c[((k + n1) * n + i + n1) * n + j + n1] = other.constant(k, i, j).clone();
                }
            }
        }
        LieAlgebra { dim: n, c }
    }
}

/// `∇_{Xᵢ}Xⱼ = Aᵏᵢⱼ Xₖ` with constant coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeftInvariantConnection {
    dim: usize,
    a: Vec<Rat>,
}

impl LeftInvariantConnection {
    pub fn new(dim: usize, a: Vec<Rat>) -> Result<LeftInvariantConnection, LieError> {
        if dim == 0 {
            return Err(LieError::EmptyDimension);
        }
        if a.len() != cube(dim) {
            return Err(LieError::ConstantCount {
                expected: cube(dim),
                got: a.len(),
            });
        }
        Ok(LeftInvariantConnection { dim, a })
    }

    /// Sets `∇_{Xᵢ}Xⱼ ∋ v Xₖ` for each `(i, j, k, v)`, zero-based; the rest is zero.
    pub fn from_entries(
        dim: usize,
        entries: &[(usize, usize, usize, Rat)],
    ) -> Result<LeftInvariantConnection, LieError> {
        let mut a = vec![Rat::zero(); cube(dim)];
        for (i, j, k, v) in entries {
            let (i, j, k) = (*i, *j, *k);
            if i >= dim || j >= dim || k >= dim {
                return Err(LieError::IndexOutOfRange { dim });
            }
            a[(k * dim + i) * dim + j] = v.clone();
        }
        LeftInvariantConnection::new(dim, a)
    }

    /// The connection with every left-invariant field parallel.
    pub fn flat(dim: usize) -> Result<LeftInvariantConnection, LieError> {
        LeftInvariantConnection::new(dim, vec![Rat::zero(); cube(dim)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coefficient(&self, k: usize, i: usize, j: usize) -> &Rat {
        &self.a[(k * self.dim + i) * self.dim + j]
    }

    /// `Tᵏᵢⱼ = Aᵏᵢⱼ − Aᵏⱼᵢ − cᵏᵢⱼ`.
    pub fn torsion(&self, alg: &LieAlgebra) -> Result<Vec<Rat>, LieError> {
        same_dim(alg.dim, self.dim)?;
        let n = self.dim;
        let mut t = Vec::with_capacity(cube(n));
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    t.push(
                        self.coefficient(k, i, j)
                            - self.coefficient(k, j, i)
                            - alg.constant(k, i, j),
                    );
                }
            }
        }
        Ok(t)
    }

    /// Errors with the first nonzero torsion component.
    pub fn check_torsion_free(&self, alg: &LieAlgebra) -> Result<(), LieError> {
        let n = self.dim;
        let t = self.torsion(alg)?;
        match t.iter().position(|v| !v.is_zero()) {
            None => Ok(()),
            Some(p) => Err(LieError::Torsion {
                k: p / (n * n),
                i: (p / n) % n,
                j: p % n,
            }),
        }
    }

    /// `∇_u v` for constant coefficient vectors.
    pub fn apply(&self, u: &[Rat], v: &[Rat]) -> Vec<Rat> {
        let n = self.dim;
        (0..n)
            .map(|k| {
                let mut acc = Rat::zero();
                for i in 0..n {
                    for j in 0..n {
                        let a = self.coefficient(k, i, j);
                        if !a.is_zero() && !u[i].is_zero() && !v[j].is_zero() {
                            acc += a * &u[i] * &v[j];
                        }
                    }
                }
                acc
            })
            .collect()
    }
}

fn same_dim(expected: usize, got: usize) -> Result<(), LieError> {
    if expected != got {
        return Err(LieError::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// `∇⁰_X Y = ½[X, Y]`, the torsion-free part of the flat left-invariant connection.
pub fn weitzenboeck0(alg: &LieAlgebra) -> LeftInvariantConnection {
    let half = rat(1, 2);
    LeftInvariantConnection {
        dim: alg.dim,
        a: alg.c.iter().map(|v| v * &half).collect(),
    }
}

fn decode(mut flat: usize, n: usize, degree: usize) -> Vec<usize> {
    let mut idx = vec![0; degree];
    for slot in (0..degree).rev() {
        idx[slot] = flat % n;
        flat /= n;
    }
    idx
}

fn encode(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

/// A left-invariant symmetric contravariant tensor, stored as the full
/// component array `T^{i₁…iᵣ}` in the frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeftInvariantSymTensor {
    dim: usize,
    degree: usize,
    comps: Vec<Rat>,
}

impl LeftInvariantSymTensor {
    /// Evaluates `f` on sorted multi-indices.
    pub fn from_fn<F: FnMut(&[usize]) -> Rat>(
        dim: usize,
        degree: usize,
        mut f: F,
    ) -> Result<LeftInvariantSymTensor, LieError> {
        if dim == 0 {
            return Err(LieError::EmptyDimension);
        }
        if degree > MAX_DEGREE {
            return Err(LieError::DegreeOverflow {
                degree,
                cap: MAX_DEGREE,
            });
        }
        let len = dim.pow(degree as u32);
        let mut comps: Vec<Rat> = Vec::with_capacity(len);
        for flat in 0..len {
            let mut idx = decode(flat, dim, degree);
            idx.sort_unstable();
            let key = encode(&idx, dim);
            let v = if key < flat {
                comps[key].clone()
            } else {
                f(&idx)
            };
            comps.push(v);
        }
        Ok(LeftInvariantSymTensor { dim, degree, comps })
    }

    pub fn new(
        dim: usize,
        degree: usize,
        comps: Vec<Rat>,
    ) -> Result<LeftInvariantSymTensor, LieError> {
        if dim == 0 {
            return Err(LieError::EmptyDimension);
        }
        if degree > MAX_DEGREE {
            return Err(LieError::DegreeOverflow {
                degree,
                cap: MAX_DEGREE,
            });
        }
        let len = dim.pow(degree as u32);
        if comps.len() != len {
            return Err(LieError::ConstantCount {
                expected: len,
                got: comps.len(),
            });
        }
        for flat in 0..len {
            let mut idx = decode(flat, dim, degree);
            idx.sort_unstable();
            if comps[encode(&idx, dim)] != comps[flat] {
                return Err(LieError::NotSymmetric);
            }
        }
        Ok(LeftInvariantSymTensor { dim, degree, comps })
    }

    pub fn zero(dim: usize, degree: usize) -> Result<LeftInvariantSymTensor, LieError> {
        LeftInvariantSymTensor::from_fn(dim, degree, |_| Rat::zero())
    }

    /// Degree-2 tensor from a symmetric matrix.
    pub fn from_matrix(m: &RatMatrix) -> Result<LeftInvariantSymTensor, LieError> {
        same_dim(m.rows(), m.cols())?;
        let n = m.rows();
        LeftInvariantSymTensor::new(
            n,
            2,
            (0..n * n).map(|f| m.get(f / n, f % n).clone()).collect(),
        )
    }

    pub fn vector(comps: Vec<Rat>) -> Result<LeftInvariantSymTensor, LieError> {
        let n = comps.len();
        LeftInvariantSymTensor::new(n, 1, comps)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn component(&self, idx: &[usize]) -> &Rat {
        &self.comps[encode(idx, self.dim)]
    }

    pub fn components(&self) -> &[Rat] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &LeftInvariantSymTensor) -> Result<LeftInvariantSymTensor, LieError> {
        self.compatible(other)?;
        Ok(LeftInvariantSymTensor {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        })
    }

    pub fn scale(&self, s: &Rat) -> LeftInvariantSymTensor {
        LeftInvariantSymTensor {
            comps: self.comps.iter().map(|a| a * s).collect(),
            ..self.clone()
        }
    }

    fn compatible(&self, other: &LeftInvariantSymTensor) -> Result<(), LieError> {
        same_dim(self.dim, other.dim)?;
        same_dim(self.degree, other.degree)
    }

    /// Unnormalized symmetric product: a sum over the ways of splitting
    /// the index slots, so `X⊙X = 2 X⊗X`.
    pub fn sym_product(
        &self,
        other: &LeftInvariantSymTensor,
    ) -> Result<LeftInvariantSymTensor, LieError> {
        same_dim(self.dim, other.dim)?;
        let (r, s) = (self.degree, other.degree);
        let degree = r + s;
        let n = self.dim;
        let splits: Vec<u32> = (0u32..1 << degree)
            .filter(|m| m.count_ones() as usize == r)
            .collect();
        LeftInvariantSymTensor::from_fn(n, degree, |idx| {
            let mut acc = Rat::zero();
            for &mask in &splits {
                let (mut a, mut b) = (Vec::with_capacity(r), Vec::with_capacity(s));
                for (slot, &i) in idx.iter().enumerate() {
                    if mask & (1 << slot) != 0 {
                        a.push(i);
                    } else {
                        b.push(i);
                    }
                }
                let x = self.component(&a);
                if !x.is_zero() {
                    acc += x * other.component(&b);
                }
            }
            acc
        })
    }

    /// `(ι_α T)^{i…} = α_j T^{j i…}`.
    pub fn contract_form(&self, alpha: &[Rat]) -> Result<LeftInvariantSymTensor, LieError> {
        same_dim(self.dim, alpha.len())?;
        if self.degree == 0 {
            return LeftInvariantSymTensor::zero(self.dim, 0);
        }
        let n = self.dim;
        LeftInvariantSymTensor::from_fn(n, self.degree - 1, |idx| {
            let mut full = Vec::with_capacity(idx.len() + 1);
            full.push(0);
            full.extend_from_slice(idx);
            let mut acc = Rat::zero();
            for (j, a) in alpha.iter().enumerate() {
                if !a.is_zero() {
                    full[0] = j;
                    acc += a * self.component(&full);
                }
            }
            acc
        })
    }

    /// `θ(εⁱ)` for each `i`, as coefficient vectors in the frame.
    pub fn generators(&self) -> Vec<Vec<Rat>> {
        (0..self.dim)
            .map(|i| {
                let eps: Vec<Rat> = (0..self.dim).map(|k| int((k == i) as i64)).collect();
                self.contract_form(&eps)
                    .map(|t| t.comps)
                    .unwrap_or_default()
            })
            .collect()
    }
}

/// `⟨Xᵢ, Xⱼ⟩_s = ∇_{Xᵢ}Xⱼ + ∇_{Xⱼ}Xᵢ`.
pub fn li_symmetric_bracket(nabla: &LeftInvariantConnection, i: usize, j: usize) -> Vec<Rat> {
    (0..nabla.dim)
        .map(|k| nabla.coefficient(k, i, j) + nabla.coefficient(k, j, i))
        .collect()
}

/// `∇_{Xᵢ}T`, from `(∇ᵢT)^{a…} = Σ_slots Aᵃᵢᵦ T^{…b…}`.
pub fn li_covariant_derivative(
    nabla: &LeftInvariantConnection,
    t: &LeftInvariantSymTensor,
    i: usize,
) -> Result<LeftInvariantSymTensor, LieError> {
    same_dim(nabla.dim, t.dim)?;
    if i >= t.dim {
        return Err(LieError::IndexOutOfRange { dim: t.dim });
    }
    let n = t.dim;
    LeftInvariantSymTensor::from_fn(n, t.degree, |idx| {
        let mut acc = Rat::zero();
        let mut moved = idx.to_vec();
        for slot in 0..idx.len() {
            for b in 0..n {
                let a = nabla.coefficient(idx[slot], i, b);
                if a.is_zero() {
                    continue;
                }
                moved[slot] = b;
                acc += a * t.component(&moved);
            }
            moved[slot] = idx[slot];
        }
        acc
    })
}

/// `∇_u T` for a constant coefficient vector `u`.
pub fn li_derivative_along(
    nabla: &LeftInvariantConnection,
    t: &LeftInvariantSymTensor,
    u: &[Rat],
) -> Result<LeftInvariantSymTensor, LieError> {
    same_dim(t.dim, u.len())?;
    let mut acc = LeftInvariantSymTensor::zero(t.dim, t.degree)?;
    for (i, ui) in u.iter().enumerate() {
        if !ui.is_zero() {
            acc = acc.add(&li_covariant_derivative(nabla, t, i)?.scale(ui))?;
        }
    }
    Ok(acc)
}

/// `[A, B]_s = Σₖ (ι_{εᵏ}A)⊙∇_{Xₖ}B + ∇_{Xₖ}A⊙ι_{εᵏ}B`.
pub fn li_schouten(
    nabla: &LeftInvariantConnection,
    a: &LeftInvariantSymTensor,
    b: &LeftInvariantSymTensor,
) -> Result<LeftInvariantSymTensor, LieError> {
    same_dim(a.dim, b.dim)?;
    same_dim(nabla.dim, a.dim)?;
    let n = a.dim;
    let degree = (a.degree + b.degree).saturating_sub(1);
    if a.degree + b.degree == 0 {
        return LeftInvariantSymTensor::zero(n, 0);
    }
    let mut acc = LeftInvariantSymTensor::zero(n, degree)?;
    for k in 0..n {
        let eps: Vec<Rat> = (0..n).map(|m| int((m == k) as i64)).collect();
        if a.degree > 0 {
            let term = a
                .contract_form(&eps)?
                .sym_product(&li_covariant_derivative(nabla, b, k)?)?;
            acc = acc.add(&term)?;
        }
        if b.degree > 0 {
            let term =
                li_covariant_derivative(nabla, a, k)?.sym_product(&b.contract_form(&eps)?)?;
            acc = acc.add(&term)?;
        }
    }
    Ok(acc)
}

fn degree_two(theta: &LeftInvariantSymTensor) -> Result<(), LieError> {
    if theta.degree != 2 {
        return Err(LieError::DegreeOverflow {
            degree: theta.degree,
            cap: 2,
        });
    }
    Ok(())
}

/// `[θ, θ]_s = 0`. The connection must be torsion-free for `alg`.
pub fn li_is_symmetric_poisson(
    alg: &LieAlgebra,
    nabla: &LeftInvariantConnection,
    theta: &LeftInvariantSymTensor,
) -> Result<bool, LieError> {
    nabla.check_torsion_free(alg)?;
    degree_two(theta)?;
    Ok(li_schouten(nabla, theta, theta)?.is_zero())
}

/// `∇_{θ(εⁱ)}θ` for each `i`.
pub fn li_strong_obstructions(
    nabla: &LeftInvariantConnection,
    theta: &LeftInvariantSymTensor,
) -> Result<Vec<LeftInvariantSymTensor>, LieError> {
    theta
        .generators()
        .iter()
        .map(|g| li_derivative_along(nabla, theta, g))
        .collect()
}

/// Symmetric Poisson and `∇_{θ(εⁱ)}θ = 0` for every `i`.
pub fn li_is_strong(
    alg: &LieAlgebra,
    nabla: &LeftInvariantConnection,
    theta: &LeftInvariantSymTensor,
) -> Result<bool, LieError> {
    if !li_is_symmetric_poisson(alg, nabla, theta)? {
        return Ok(false);
    }
    Ok(li_strong_obstructions(nabla, theta)?
        .iter()
        .all(LeftInvariantSymTensor::is_zero))
}

/// `∇θ = 0`.
pub fn li_is_parallel(
    nabla: &LeftInvariantConnection,
    theta: &LeftInvariantSymTensor,
) -> Result<bool, LieError> {
    for i in 0..theta.dim {
        if !li_covariant_derivative(nabla, theta, i)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `span{θ(εⁱ)}` is a subalgebra, so the left-invariant distribution it
/// spans is integrable.
pub fn li_is_involutive(
    alg: &LieAlgebra,
    theta: &LeftInvariantSymTensor,
) -> Result<bool, LieError> {
    same_dim(alg.dim, theta.dim)?;
    degree_two(theta)?;
    let n = alg.dim;
    let gens = theta.generators();
    let span = |vs: &[Vec<Rat>]| RatMatrix::from_fn(vs.len(), n, |r, c| vs[r][c].clone()).rank();
    let base = span(&gens);
    let mut all = gens.clone();
    for i in 0..n {
        for j in i + 1..n {
            all.push(alg.bracket(&gens[i], &gens[j]));
        }
    }
    Ok(span(&all) == base)
}

/// `Rˡₖᵢⱼ` with `R(Xᵢ, Xⱼ)Xₖ = Rˡₖᵢⱼ Xₗ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiCurvature {
    dim: usize,
    r: Vec<Rat>,
}

impl LiCurvature {
    pub fn component(&self, l: usize, k: usize, i: usize, j: usize) -> &Rat {
        let n = self.dim;
        &self.r[((l * n + k) * n + i) * n + j]
    }

    /// `R(x, y)z`.
    pub fn apply(&self, x: &[Rat], y: &[Rat], z: &[Rat]) -> Vec<Rat> {
        let n = self.dim;
        (0..n)
            .map(|l| {
                let mut acc = Rat::zero();
                for k in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            let r = self.component(l, k, i, j);
                            if !r.is_zero() {
                                acc += r * &z[k] * &x[i] * &y[j];
                            }
                        }
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_flat(&self) -> bool {
        self.r.iter().all(Zero::is_zero)
    }
}

/// `R(X, Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]}Z` on the frame:
/// `Rˡₖᵢⱼ = AᵐⱼₖAˡᵢₘ − AᵐᵢₖAˡⱼₘ − cᵐᵢⱼAˡₘₖ`.
pub fn li_curvature(
    alg: &LieAlgebra,
    nabla: &LeftInvariantConnection,
) -> Result<LiCurvature, LieError> {
    same_dim(alg.dim, nabla.dim)?;
    let n = alg.dim;
    let a = |k: usize, i: usize, j: usize| nabla.coefficient(k, i, j);
    let mut r = Vec::with_capacity(n * n * n * n);
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = Rat::zero();
                    for m in 0..n {
                        acc += a(m, j, k) * a(l, i, m);
                        acc -= a(m, i, k) * a(l, j, m);
                        acc -= alg.constant(m, i, j) * a(l, m, k);
                    }
                    r.push(acc);
                }
            }
        }
    }
    Ok(LiCurvature { dim: n, r })
}

fn levi_civita_structure(n: usize, eps_scale: i64) -> LieAlgebra {
    let s = int(eps_scale);
    LieAlgebra::from_brackets(
        n,
        &[(0, 1, 2, s.clone()), (1, 2, 0, s.clone()), (2, 0, 1, s)],
    )
    .expect("Lie algebra")
}

/// `[Xᵢ, Xⱼ] = ε_{ijk} Xₖ`.
pub fn so3() -> LieAlgebra {
    levi_civita_structure(3, 1)
}

/// The imaginary quaternions `i, j, k`: `[Xᵢ, Xⱼ] = 2ε_{ijk} Xₖ`.
pub fn su2() -> LieAlgebra {
    levi_civita_structure(3, 2)
}

/// `[X, Y] = Y`.
pub fn aff1() -> LieAlgebra {
    LieAlgebra::from_brackets(2, &[(0, 1, 1, int(1))]).expect("Lie algebra")
}

/// `[X, Y] = Y` with a central `Z`.
pub fn aff1_x_r() -> LieAlgebra {
    aff1().direct_sum(&LieAlgebra::abelian(1).expect("dim 1"))
}

/// `[X, Y] = Z`, all else zero.
pub fn heisenberg3() -> LieAlgebra {
    LieAlgebra::from_brackets(3, &[(0, 1, 2, int(1))]).expect("Lie algebra")
}

/// The torsion-free connection on `aff(1) ⊕ ℝ` with `∇_X X = −X`,
/// `∇_X Y = Y` and all other frame derivatives zero.
pub fn aff1_x_r_connection() -> LeftInvariantConnection {
    LeftInvariantConnection::from_entries(3, &[(0, 0, 0, int(-1)), (0, 1, 1, int(1))])
        .expect("indices in range")
}

pub const CATALOG_IDS: [&str; 6] = ["abelian_n", "so3", "aff1", "aff1xR", "su2", "heisenberg3"];

/// Looks up an algebra; `abelian_<n>` selects the abelian algebra of
/// dimension `n` (1 to 8).
pub fn catalog_algebra(id: &str) -> Result<LieAlgebra, LieError> {
    match id {
        "so3" => Ok(so3()),
        "su2" => Ok(su2()),
        "aff1" => Ok(aff1()),
        "aff1xR" => Ok(aff1_x_r()),
        "heisenberg3" => Ok(heisenberg3()),
        _ => {
            let n = id
                .strip_prefix("abelian_")
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|n| (1..=8).contains(n))
                .ok_or_else(|| LieError::UnknownId(id.to_string()))?;
            LieAlgebra::abelian(n)
        }
    }
}

/// Generator of the flow of the left-invariant field `m ↦ m(ai + bj + ck)`
/// on the unit quaternions, in coordinates `(x, y, z, w)` for
/// `x + yi + zj + wk`.
pub fn hopf_matrix(a: f64, b: f64, c: f64) -> [[f64; 4]; 4] {
    [
        [0.0, -a, -b, -c],
        [a, 0.0, c, -b],
        [b, -c, 0.0, a],
        [c, b, -a, 0.0],
    ]
}

/// `exp(tM) q₀` in closed form: `M² = −ω²` with `ω² = a² + b² + c²`, so
/// `exp(tM) = cos(ωt) + sin(ωt)/ω · M`.
pub fn su2_flow(a: f64, b: f64, c: f64, q0: [f64; 4], t: f64) -> Result<[f64; 4], LieError> {
    if ![a, b, c, t].iter().chain(q0.iter()).all(|v| v.is_finite()) {
        return Err(LieError::NonFinite);
    }
    let norm = q0.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(LieError::NotUnit(norm));
    }
    let m = hopf_matrix(a, b, c);
    let omega = (a * a + b * b + c * c).sqrt();
    let (cos, sinc) = if omega == 0.0 {
        (1.0, t)
    } else {
        ((omega * t).cos(), (omega * t).sin() / omega)
    };
    let mut out = [0.0; 4];
    for (r, o) in out.iter_mut().enumerate() {
        let mq: f64 = (0..4).map(|k| m[r][k] * q0[k]).sum();
        *o = cos * q0[r] + sinc * mq;
    }
    if !out.iter().all(|v| v.is_finite()) {
        return Err(LieError::NonFinite);
    }
    Ok(out)
}

/// A left-invariant frame written in global coordinates of the group,
/// together with its dual coframe.
#[derive(Debug, Clone)]
pub struct CoordinateFrame {
    chart: Arc<Chart>,
    /// `frame[i][μ]`: component `μ` of `Xᵢ`.
    frame: Vec<Vec<Expr>>,
    /// `coframe[i][μ]`: component `μ` of `εⁱ`.
    coframe: Vec<Vec<Expr>>,
}

impl CoordinateFrame {
    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn frame_field(&self, i: usize) -> SymTensorField {
        SymTensorField::vector(&self.chart, self.frame[i].clone()).expect("frame length")
    }

    pub fn coframe(&self) -> &[Vec<Expr>] {
        &self.coframe
    }

    /// Chart components `T^{μ…} = T^{i…} X_i^μ …`.
    pub fn export_tensor(&self, t: &LeftInvariantSymTensor) -> Result<SymTensorField, LieError> {
        let n = self.chart.dim();
        same_dim(n, t.dim)?;
        let r = t.degree;
        Ok(SymTensorField::from_fn(&self.chart, r, |mu| {
            let mut terms = Vec::new();
            for flat in 0..n.pow(r as u32) {
                let idx = decode(flat, n, r);
                let c = t.component(&idx);
                if c.is_zero() {
                    continue;
                }
                let mut term = Expr::constant(to_f64(c));
                for (slot, &i) in idx.iter().enumerate() {
                    term = term * self.frame[i][mu[slot]].clone();
                }
                terms.push(term);
            }
            Expr::sum(terms)
        })?)
    }

    /// Christoffel symbols of a left-invariant connection:
    /// `∇_{∂μ}∂ν = εⁱ_μ (Xᵢ(εʲ_ν) Xⱼ + εʲ_ν Aᵏᵢⱼ Xₖ)`. Torsion is checked on samples.
    pub fn export_connection(
        &self,
        nabla: &LeftInvariantConnection,
        sampling: &Sampling,
    ) -> Result<TorsionFree, LieError> {
        let n = self.chart.dim();
        same_dim(n, nabla.dim)?;
        let along = |i: usize, f: &Expr| {
            Expr::sum((0..n).map(|rho| self.frame[i][rho].clone() * f.diff(rho)))
        };
        let conn = Connection::from_fn(&self.chart, |lambda, mu, nu| {
            let mut terms = Vec::new();
            for i in 0..n {
                let fi = &self.coframe[i][mu];
                if fi.is_const_zero() {
                    continue;
                }
                for j in 0..n {
                    let d = along(i, &self.coframe[j][nu]);
                    if !d.is_const_zero() {
                        terms.push(fi.clone() * d * self.frame[j][lambda].clone());
                    }
                    for k in 0..n {
                        let a = nabla.coefficient(k, i, j);
                        if a.is_zero() {
                            continue;
                        }
                        terms.push(
                            fi.clone()
                                * self.coframe[j][nu].clone()
                                * self.frame[k][lambda].clone()
                                * to_f64(a),
                        );
                    }
                }
            }
            Expr::sum(terms)
        });
        Ok(conn.torsion_free(sampling)?)
    }
}

/// Global polynomial frames for the catalog algebras that have one:
/// - `abelian_<n>`: `∂ᵢ`;
/// - `aff1` on `a > 0`: `X = a∂a`, `Y = a∂b`;
/// - `aff1xR`: as `aff1` with `Z = ∂c`;
/// - `heisenberg3`: `X = ∂x`, `Y = ∂y + x∂z`, `Z = ∂z`.
pub fn coordinate_frame(id: &str) -> Result<(LieAlgebra, CoordinateFrame), LieError> {
    let v = Expr::var;
    let z = Expr::zero;
    let o = Expr::one;
    let (names, bx, frame, coframe): (Vec<&str>, Vec<(f64, f64)>, Vec<Vec<Expr>>, Vec<Vec<Expr>>) =
        match id {
            "aff1" => (
                vec!["a", "b"],
                vec![(0.5, 2.0), (-1.0, 1.0)],
                vec![vec![v(0), z()], vec![z(), v(0)]],
                vec![
                    vec![Expr::powi(&v(0), -1), z()],
                    vec![z(), Expr::powi(&v(0), -1)],
                ],
            ),
            "aff1xR" => (
                vec!["a", "b", "c"],
                vec![(0.5, 2.0), (-1.0, 1.0), (-1.0, 1.0)],
                vec![
                    vec![v(0), z(), z()],
                    vec![z(), v(0), z()],
                    vec![z(), z(), o()],
                ],
                vec![
                    vec![Expr::powi(&v(0), -1), z(), z()],
                    vec![z(), Expr::powi(&v(0), -1), z()],
                    vec![z(), z(), o()],
                ],
            ),
            "heisenberg3" => (
                vec!["x", "y", "z"],
                vec![(-1.0, 1.0); 3],
                vec![
                    vec![o(), z(), z()],
                    vec![z(), o(), v(0)],
                    vec![z(), z(), o()],
                ],
                vec![
                    vec![o(), z(), z()],
                    vec![z(), o(), z()],
                    vec![z(), -v(0), o()],
                ],
            ),
            "so3" | "su2" => return Err(LieError::NoFrame(id.to_string())),
            _ => {
                let alg = catalog_algebra(id)?;
                let n = alg.dim();
                let unit = |i: usize| {
                    (0..n)
                        .map(|m| if m == i { o() } else { z() })
                        .collect::<Vec<_>>()
                };
                let chart = Arc::new(Chart::standard(n));
                let frame = CoordinateFrame {
                    chart,
                    frame: (0..n).map(unit).collect(),
                    coframe: (0..n).map(unit).collect(),
                };
                return Ok((alg, frame));
            }
        };
    let chart = Arc::new(Chart::new(
        names.iter().map(|s| s.to_string()).collect(),
        bx,
    )?);
    Ok((
        catalog_algebra(id)?,
        CoordinateFrame {
            chart,
            frame,
            coframe,
        },
    ))
}

/// Expected verdicts of a left-invariant catalog structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiExpected {
    pub symmetric_poisson: bool,
    pub strong: bool,
    pub parallel: bool,
    pub involutive: bool,
}

/// A left-invariant structure with its expected verdicts.
#[derive(Debug, Clone)]
pub struct LiCatalogEntry {
    pub id: &'static str,
    /// Key for [`catalog_algebra`] and [`coordinate_frame`].
    pub algebra_id: &'static str,
    pub description: &'static str,
    pub algebra: LieAlgebra,
    pub connection: LeftInvariantConnection,
    pub theta: LeftInvariantSymTensor,
    pub expected: LiExpected,
}

/// Computed verdicts, in the order of [`LiExpected`].
pub fn li_verdicts(entry: &LiCatalogEntry) -> Result<LiExpected, LieError> {
    let (alg, nabla, theta) = (&entry.algebra, &entry.connection, &entry.theta);
    Ok(LiExpected {
        symmetric_poisson: li_is_symmetric_poisson(alg, nabla, theta)?,
        strong: li_is_strong(alg, nabla, theta)?,
        parallel: li_is_parallel(nabla, theta)?,
        involutive: li_is_involutive(alg, theta)?,
    })
}

fn diagonal(entries: &[Rat]) -> LeftInvariantSymTensor {
    let n = entries.len();
    LeftInvariantSymTensor::from_fn(n, 2, |ij| {
        if ij[0] == ij[1] {
            entries[ij[0]].clone()
        } else {
            Rat::zero()
        }
    })
    .expect("valid dimension")
}

fn expected(symmetric_poisson: bool, strong: bool, parallel: bool, involutive: bool) -> LiExpected {
    LiExpected {
        symmetric_poisson,
        strong,
        parallel,
        involutive,
    }
}

/// Looks up a shipped left-invariant structure.
pub fn li_catalog_entry(id: &str) -> Result<LiCatalogEntry, LieError> {
    li_catalog()
        .into_iter()
        .find(|e| e.id == id)
        .ok_or_else(|| LieError::UnknownId(id.to_string()))
}

/// The shipped left-invariant structures.
pub fn li_catalog() -> Vec<LiCatalogEntry> {
    let zero = Rat::zero;
    let one = || int(1);
    let aff1_rank_two = LeftInvariantSymTensor::from_fn(2, 2, |ij| match (ij[0], ij[1]) {
        (0, 0) => int(1),
        (0, 1) => int(1),
        _ => int(2),
    })
    .expect("dim 2");
    let x_dot_y = LeftInvariantSymTensor::from_fn(3, 2, |ij| {
        if (ij[0], ij[1]) == (0, 1) {
            int(1)
        } else {
            Rat::zero()
        }
    })
    .expect("dim 3");
    vec![
        LiCatalogEntry {
            id: "so3",
            algebra_id: "so3",
            description: "so(3), X1⊗X1 + X2⊗X2, Weitzenböck",
            algebra: so3(),
            connection: weitzenboeck0(&so3()),
            theta: diagonal(&[one(), one(), zero()]),
            expected: expected(true, false, false, false),
        },
        LiCatalogEntry {
            id: "su2",
            algebra_id: "su2",
            description: "su(2), inverse Cartan-Killing metric, Weitzenböck",
            algebra: su2(),
            connection: weitzenboeck0(&su2()),
            theta: diagonal(&[rat(1, 8), rat(1, 8), rat(1, 8)]),
            expected: expected(true, true, true, true),
        },
        LiCatalogEntry {
            id: "aff1",
            algebra_id: "aff1",
            description: "aff(1), X⊗X, Weitzenböck",
            algebra: aff1(),
            connection: weitzenboeck0(&aff1()),
            theta: diagonal(&[one(), zero()]),
            expected: expected(true, true, false, true),
        },
        LiCatalogEntry {
            id: "aff1_generic",
            algebra_id: "aff1",
            description: "aff(1), X⊗X + X⊙Y + 2Y⊗Y, Weitzenböck",
            algebra: aff1(),
            connection: weitzenboeck0(&aff1()),
            theta: aff1_rank_two,
            expected: expected(true, false, false, true),
        },
        LiCatalogEntry {
            id: "aff1xR",
            algebra_id: "aff1xR",
            description: "aff(1)⊕ℝ, X⊙Y, ∇_X X = −X, ∇_X Y = Y",
            algebra: aff1_x_r(),
            connection: aff1_x_r_connection(),
            theta: x_dot_y,
            expected: expected(true, true, true, true),
        },
        LiCatalogEntry {
            id: "heisenberg3",
            algebra_id: "heisenberg3",
            description: "Heisenberg, Z⊗Z, Weitzenböck",
            algebra: heisenberg3(),
            connection: weitzenboeck0(&heisenberg3()),
            theta: diagonal(&[zero(), zero(), one()]),
            expected: expected(true, true, true, true),
        },
        LiCatalogEntry {
            id: "abelian_3",
            algebra_id: "abelian_3",
            description: "ℝ³, identity, flat",
            algebra: LieAlgebra::abelian(3).expect("dim 3"),
            connection: LeftInvariantConnection::flat(3).expect("dim 3"),
            theta: diagonal(&[one(), one(), one()]),
            expected: expected(true, true, true, true),
        },
    ]
}
