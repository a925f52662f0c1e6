use std::fmt;
use std::marker::PhantomData;
use std::sync::Arc;

use crate::expr::{EvalError, Expr, ScalarField};
use crate::sampling::{check_zero, Sampling, Verdict};

use super::{Chart, GeometryError, MAX_DEGREE};

/// Index position of a symmetric field.
pub trait Variance: Copy + Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Dual: Variance<Dual = Self>;
    const UPPER: bool;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Upper;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lower;

impl Variance for Upper {
    type Dual = Lower;
    const UPPER: bool = true;
}

impl Variance for Lower {
    type Dual = Upper;
    const UPPER: bool = false;
}

/// A totally symmetric field of degree `r` storing all `n^r` components.
///
/// Components are only ever created through [`SymField::from_fn`] (or
/// operations built on it), which evaluates the generator on sorted
/// multi-indices and copies the result to every permutation.
#[derive(Clone)]
pub struct SymField<V: Variance> {
    chart: Arc<Chart>,
    degree: usize,
    comps: Vec<Expr>,
    _variance: PhantomData<V>,
}

/// Symmetric multivector field, `θ` lives here at degree 2.
pub type SymTensorField = SymField<Upper>;
/// Symmetric covariant field (metrics, Killing tensors).
pub type SymFormField = SymField<Lower>;

pub(crate) fn decode(mut flat: usize, n: usize, r: usize, out: &mut [usize]) {
    for s in (0..r).rev() {
        out[s] = flat % n;
        flat /= n;
    }
}

pub(crate) fn encode(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

/// All sorted multi-indices of length `r` over `0..n`.
pub(crate) fn sorted_indices(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; r];
    fn rec(n: usize, pos: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur[pos] = i;
            rec(n, pos + 1, i, cur, out);
        }
    }
    rec(n, 0, 0, &mut cur, &mut out);
    out
}

pub(crate) fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl<V: Variance> SymField<V> {
    /// Builds a field by evaluating `f` once per sorted multi-index.
    pub fn from_fn<F>(
        chart: &Arc<Chart>,
        degree: usize,
        mut f: F,
    ) -> Result<SymField<V>, GeometryError>
    where
        F: FnMut(&[usize]) -> Expr,
    {
        if degree > MAX_DEGREE {
            return Err(GeometryError::DegreeOverflow {
                degree,
                cap: MAX_DEGREE,
            });
        }
        let n = chart.dim();
        let len = n.pow(degree as u32);
        let mut comps = vec![Expr::zero(); len];
        let mut idx = vec![0usize; degree];
        let mut sorted = vec![0usize; degree];
        for flat in 0..len {
            decode(flat, n, degree, &mut idx);
            sorted.copy_from_slice(&idx);
            sorted.sort_unstable();
            let key = encode(&sorted, n);
            comps[flat] = if key < flat {
                comps[key].clone()
            } else {
                f(&sorted)
            };
        }
        Ok(SymField {
            chart: Arc::clone(chart),
            degree,
            comps,
            _variance: PhantomData,
        })
    }

    pub fn zero(chart: &Arc<Chart>, degree: usize) -> Result<SymField<V>, GeometryError> {
        SymField::from_fn(chart, degree, |_| Expr::zero())
    }

    pub fn scalar(chart: &Arc<Chart>, f: Expr) -> SymField<V> {
        SymField {
            chart: Arc::clone(chart),
            degree: 0,
            comps: vec![f],
            _variance: PhantomData,
        }
    }

    /// Degree-1 field from its components.
    pub fn vector(chart: &Arc<Chart>, comps: Vec<Expr>) -> Result<SymField<V>, GeometryError> {
        if comps.len() != chart.dim() {
            return Err(GeometryError::ComponentCount {
                expected: chart.dim(),
                got: comps.len(),
            });
        }
        SymField::from_fn(chart, 1, |i| comps[i[0]].clone())
    }

    /// Degree-2 field from a matrix; only entries with `i <= j` are read.
    pub fn from_matrix(chart: &Arc<Chart>, m: &[Vec<Expr>]) -> Result<SymField<V>, GeometryError> {
        let n = chart.dim();
        if m.len() != n || m.iter().any(|row| row.len() != n) {
            return Err(GeometryError::ComponentCount {
                expected: n * n,
                got: m.iter().map(Vec::len).sum(),
            });
        }
        SymField::from_fn(chart, 2, |ij| m[ij[0]][ij[1]].clone())
    }

    /// Replaces the component at `idx` (and all its permutations).
    pub fn with_component(
        mut self,
        idx: &[usize],
        value: Expr,
    ) -> Result<SymField<V>, GeometryError> {
        let n = self.dim();
        if idx.len() != self.degree || idx.iter().any(|&i| i >= n) {
            return Err(GeometryError::IndexOutOfRange {
                index: idx.to_vec(),
                dim: n,
                degree: self.degree,
            });
        }
        let mut sorted = idx.to_vec();
        sorted.sort_unstable();
        let mut cur = vec![0usize; self.degree];
        for flat in 0..self.comps.len() {
            decode(flat, n, self.degree, &mut cur);
            cur.sort_unstable();
            if cur == sorted {
                self.comps[flat] = value.clone();
            }
        }
        Ok(self)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Component at a multi-index (0-based). Panics on a malformed index.
    pub fn component(&self, idx: &[usize]) -> &Expr {
        assert_eq!(
            idx.len(),
            self.degree,
            "multi-index length must equal the degree"
        );
        &self.comps[encode(idx, self.dim())]
    }

    pub fn scalar_component(&self, idx: &[usize]) -> ScalarField {
        ScalarField::new(self.component(idx).clone(), self.dim()).expect("component within chart")
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub(crate) fn comp_flat(&self, flat: usize) -> &Expr {
        &self.comps[flat]
    }

    pub(crate) fn ensure_chart(&self, other: &Arc<Chart>) -> Result<(), GeometryError> {
        if same_chart(&self.chart, other) {
            Ok(())
        } else {
            Err(GeometryError::ChartMismatch)
        }
    }

    fn zip_with<F>(&self, other: &SymField<V>, f: F) -> Result<SymField<V>, GeometryError>
    where
        F: Fn(&Expr, &Expr) -> Expr,
    {
        self.ensure_chart(&other.chart)?;
        if self.degree != other.degree {
            return Err(GeometryError::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        Ok(SymField {
            chart: Arc::clone(&self.chart),
            degree: self.degree,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| f(a, b))
                .collect(),
            _variance: PhantomData,
        })
    }

    pub fn add(&self, other: &SymField<V>) -> Result<SymField<V>, GeometryError> {
        self.zip_with(other, Expr::add)
    }

    pub fn sub(&self, other: &SymField<V>) -> Result<SymField<V>, GeometryError> {
        self.zip_with(other, Expr::sub)
    }

    /// Componentwise map; the map must commute with index permutation,
    /// which holds for any map applied uniformly.
    pub fn map<F: Fn(&Expr) -> Expr>(&self, f: F) -> SymField<V> {
        SymField {
            chart: Arc::clone(&self.chart),
            degree: self.degree,
            comps: self.comps.iter().map(f).collect(),
            _variance: PhantomData,
        }
    }

    /// Multiplication by a function.
    pub fn scale(&self, f: &Expr) -> SymField<V> {
        self.map(|c| Expr::mul(f, c))
    }

    pub fn neg(&self) -> SymField<V> {
        self.map(Expr::neg)
    }

    /// Componentwise partial derivative in coordinate `k`.
    pub fn partial(&self, k: usize) -> SymField<V> {
        self.map(|c| c.diff(k))
    }

    /// Symmetric product: sum over all (p, q)-shuffles of index positions.
    pub fn sym_product(&self, other: &SymField<V>) -> Result<SymField<V>, GeometryError> {
        self.ensure_chart(&other.chart)?;
        let (p, q) = (self.degree, other.degree);
        let n = self.dim();
        let subsets = subsets_of_size(p + q, p);
        let mut left = vec![0usize; p];
        let mut right = vec![0usize; q];
        SymField::from_fn(&self.chart, p + q, |idx| {
            Expr::sum(subsets.iter().map(|mask| {
                let (mut a, mut b) = (0, 0);
                for (pos, &i) in idx.iter().enumerate() {
                    if mask & (1 << pos) != 0 {
                        left[a] = i;
                        a += 1;
                    } else {
                        right[b] = i;
                        b += 1;
                    }
                }
                Expr::mul(
                    &self.comps[encode(&left, n)],
                    &other.comps[encode(&right, n)],
                )
            }))
        })
    }

    /// Contraction `ι_w` with a degree-1 dual field:
    /// `(ι_w A)^{i…} = w_j A^{j i…}`; zero on degree 0.
    pub fn contract(&self, w: &SymField<V::Dual>) -> Result<SymField<V>, GeometryError> {
        self.ensure_chart(&w.chart)?;
        if w.degree != 1 {
            return Err(GeometryError::DegreeMismatch {
                left: w.degree,
                right: 1,
            });
        }
        if self.degree == 0 {
            return Ok(SymField::scalar(&self.chart, Expr::zero()));
        }
        let n = self.dim();
        let mut full = vec![0usize; self.degree];
        SymField::from_fn(&self.chart, self.degree - 1, |rest| {
            full[1..].copy_from_slice(rest);
            Expr::sum((0..n).map(|j| {
                full[0] = j;
                Expr::mul(&w.comps[j], &self.comps[encode(&full, n)])
            }))
        })
    }

    /// Contraction with a dual field of degree `s <= r` by iterated
    /// single contractions; for decomposable `w = w₁⊙…⊙w_s` this is
    /// `ι_{w₁}…ι_{w_s}`, i.e. `(1/s!) w_{j₁…j_s} A^{j₁…j_s i…}`.
    pub fn contract_by(&self, w: &SymField<V::Dual>) -> Result<SymField<V>, GeometryError> {
        self.ensure_chart(&w.chart)?;
        let s = w.degree;
        if s > self.degree {
            return SymField::zero(&self.chart, 0);
        }
        let n = self.dim();
        let factor = 1.0 / factorial(s);
        let wlen = n.pow(s as u32);
        let mut full = vec![0usize; self.degree];
        let mut head = vec![0usize; s];
        SymField::from_fn(&self.chart, self.degree - s, |rest| {
            full[s..].copy_from_slice(rest);
            let total = Expr::sum((0..wlen).map(|flat| {
                decode(flat, n, s, &mut head);
                full[..s].copy_from_slice(&head);
                Expr::mul(&w.comps[flat], &self.comps[encode(&full, n)])
            }));
            total.scale(factor)
        })
    }

    /// Evaluates every component at a point.
    pub fn eval_at(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.comps.iter().map(|c| c.eval(x)).collect()
    }

    /// Sampled test that all components vanish.
    pub fn check_zero(&self, sampling: &Sampling) -> Result<Verdict, EvalError> {
        let pts = self.chart.samples(sampling);
        self.check_zero_at(&pts, sampling.tol)
    }

    pub fn check_zero_at(&self, points: &[Vec<f64>], tol: f64) -> Result<Verdict, EvalError> {
        check_zero(&self.comps, points, tol)
    }

    /// Renders the nonzero independent components.
    pub fn describe(&self) -> String {
        let names = self.chart.names();
        let mut parts = Vec::new();
        for idx in sorted_indices(self.dim(), self.degree) {
            let c = self.component(&idx);
            if c.is_const_zero() {
                continue;
            }
            let label: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
            parts.push(format!("[{}] = {}", label.join(","), c.display(names)));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("; ")
        }
    }
}

impl<V: Variance> fmt::Debug for SymField<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Sym{}(deg {}: {})",
            if V::UPPER { "Tensor" } else { "Form" },
            self.degree,
            self.describe()
        )
    }
}

impl SymField<Upper> {
    /// `ι_α A` for a 1-form `α`.
    pub fn contract_form(&self, alpha: &SymFormField) -> Result<SymTensorField, GeometryError> {
        self.contract(alpha)
    }
}

impl SymField<Lower> {
    /// `ι_X φ` for a vector field `X`.
    pub fn contract_vector(&self, x: &SymTensorField) -> Result<SymFormField, GeometryError> {
        self.contract(x)
    }

    /// `ι_𝒳 φ` for a symmetric multivector (iterated contraction).
    pub fn contract_multivector(&self, x: &SymTensorField) -> Result<SymFormField, GeometryError> {
        self.contract_by(x)
    }

    /// Differential of a function as a 1-form.
    pub fn differential(chart: &Arc<Chart>, f: &Expr) -> SymFormField {
        SymField::vector(chart, (0..chart.dim()).map(|k| f.diff(k)).collect())
            .expect("dimension matches")
    }

    /// The coordinate 1-form `dx^i`.
    pub fn coordinate_form(chart: &Arc<Chart>, i: usize) -> SymFormField {
        let n = chart.dim();
        SymField::vector(
            chart,
            (0..n)
                .map(|k| if k == i { Expr::one() } else { Expr::zero() })
                .collect(),
        )
        .expect("dimension matches")
    }
}

impl SymField<Upper> {
    /// The coordinate vector field `∂_i`.
    pub fn coordinate_vector(chart: &Arc<Chart>, i: usize) -> SymTensorField {
        let n = chart.dim();
        SymField::vector(
            chart,
            (0..n)
                .map(|k| if k == i { Expr::one() } else { Expr::zero() })
                .collect(),
        )
        .expect("dimension matches")
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Bitmasks over `0..len` with exactly `k` bits set.
pub(crate) fn subsets_of_size(len: usize, k: usize) -> Vec<u32> {
    (0u32..(1u32 << len))
        .filter(|m| m.count_ones() as usize == k)
        .collect()
}
