//! Pointwise characteristic distribution and metric, and the sampled
//! involutivity test.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::expr::EvalError;
use crate::geometry::{lie_bracket, GeometryError, SymTensorField};
use crate::sampling::Sampling;

use super::SymPoissonPair;

/// Relative rank threshold: eigenvalues with `|λ| < RANK_THRESHOLD·(max|λ| + 1)`
/// count as zero.
pub const RANK_THRESHOLD: f64 = 1e-8;

/// Component matrix of a degree-2 field at a point.
pub fn matrix_at(theta: &SymTensorField, x: &[f64]) -> Result<DMatrix<f64>, EvalError> {
    let n = theta.dim();
    let vals = theta.eval_at(x)?;
    Ok(DMatrix::from_row_slice(n, n, &vals))
}

/// `im θ` and the metric `g_θ(θα, θβ) = θ(α, β)` at a point.
#[derive(Debug, Clone)]
pub struct CharacteristicData {
    pub point: Vec<f64>,
    pub rank: usize,
    /// `(positive, negative)` eigenvalue counts of `θ`, hence of `g_θ`.
    pub signature: (usize, usize),
    /// Orthonormal basis of `im θ` (columns), eigenvectors of `θ`.
    pub basis: DMatrix<f64>,
    /// Gram matrix of `g_θ` on `basis`: the inverted nonzero eigenvalues.
    pub metric_gram: DMatrix<f64>,
    theta: DMatrix<f64>,
}

impl CharacteristicData {
    pub fn from_matrix(point: Vec<f64>, theta: DMatrix<f64>) -> CharacteristicData {
        let n = theta.nrows();
        let eig = SymmetricEigen::new(theta.clone());
        let largest = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let cut = RANK_THRESHOLD * (largest + 1.0);
        let kept: Vec<usize> = (0..n)
            .filter(|&i| eig.eigenvalues[i].abs() >= cut)
            .collect();
        let rank = kept.len();
        let mut basis = DMatrix::zeros(n, rank);
        let mut gram = DMatrix::zeros(rank, rank);
        let (mut pos, mut neg) = (0, 0);
        for (c, &i) in kept.iter().enumerate() {
            basis.set_column(c, &eig.eigenvectors.column(i));
            let lambda = eig.eigenvalues[i];
            gram[(c, c)] = 1.0 / lambda;
            if lambda > 0.0 {
                pos += 1;
            } else {
                neg += 1;
            }
        }
        CharacteristicData {
            point,
            rank,
            signature: (pos, neg),
            basis,
            metric_gram: gram,
            theta,
        }
    }

    pub fn theta_matrix(&self) -> &DMatrix<f64> {
        &self.theta
    }

    /// `θ⁺ = B G Bᵀ`, the inverse of `θ` on its image extended by zero.
    pub fn restricted_inverse(&self) -> DMatrix<f64> {
        &self.basis * &self.metric_gram * self.basis.transpose()
    }

    /// `g_θ(u, v)` for tangent vectors in `im θ`.
    pub fn metric(&self, u: &[f64], v: &[f64]) -> f64 {
        let u = DVector::from_column_slice(u);
        let v = DVector::from_column_slice(v);
        (u.transpose() * self.restricted_inverse() * v)[(0, 0)]
    }

    /// Gram matrix of `g_θ` on the given vectors (columns, assumed in `im θ`).
    pub fn gram_on(&self, vectors: &DMatrix<f64>) -> DMatrix<f64> {
        vectors.transpose() * self.restricted_inverse() * vectors
    }

    /// Rebuilds `θ = q·g⁻¹·qᵗ` from the image basis and the metric.
    pub fn reconstruct_theta(&self) -> DMatrix<f64> {
        if self.rank == 0 {
            return DMatrix::zeros(self.theta.nrows(), self.theta.ncols());
        }
        let g_inv = self
            .metric_gram
            .clone()
            .try_inverse()
            .expect("gram is diagonal with nonzero entries");
        &self.basis * g_inv * self.basis.transpose()
    }

    /// Euclidean norm of the component of `v` orthogonal to `im θ`.
    pub fn distance_to_image(&self, v: &[f64]) -> f64 {
        let v = DVector::from_column_slice(v);
        let proj = &self.basis * (self.basis.transpose() * &v);
        (v - proj).norm()
    }
}

pub fn characteristic_data(
    theta: &SymTensorField,
    point: &[f64],
) -> Result<CharacteristicData, EvalError> {
    Ok(CharacteristicData::from_matrix(
        point.to_vec(),
        matrix_at(theta, point)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Involutivity {
    InvolutiveOnSamples,
    NotInvolutive,
    Inconclusive,
}

impl Involutivity {
    pub fn label(self) -> &'static str {
        match self {
            Involutivity::InvolutiveOnSamples => "involutive_on_samples",
            Involutivity::NotInvolutive => "not_involutive",
            Involutivity::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone)]
pub struct InvolutivityReport {
    pub verdict: Involutivity,
    /// Largest normalized residual `dist([Xi,Xj], im θ) / (1 + |[Xi,Xj]|)`.
    pub max_residual: f64,
    pub ranks: Vec<usize>,
    pub samples: usize,
}

/// Pointwise test that `[θ(dx^i), θ(dx^j)]` lies in `im θ` at each sample.
pub fn involutivity_check(
    pair: &SymPoissonPair,
    sampling: &Sampling,
) -> Result<InvolutivityReport, GeometryError> {
    let n = pair.dim();
    let gens: Vec<SymTensorField> = (0..n).map(|i| pair.generator(i)).collect();
    let mut brackets = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            brackets.push(lie_bracket(&gens[i], &gens[j])?);
        }
    }
    let pts = pair.chart().samples(sampling);
    let mut worst: f64 = 0.0;
    let mut ranks = Vec::with_capacity(pts.len());
    let mut failed = false;
    for x in &pts {
        let data = characteristic_data(pair.theta(), x)?;
        ranks.push(data.rank);
        for b in &brackets {
            let v = b.eval_at(x)?;
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            let r = data.distance_to_image(&v) / (1.0 + norm);
            if r.is_nan() || r > worst {
                worst = r;
            }
            if !(r <= sampling.tol) {
                failed = true;
            }
        }
    }
    let constant_rank = ranks.windows(2).all(|w| w[0] == w[1]);
    let verdict = if failed {
        Involutivity::NotInvolutive
    } else if constant_rank {
        Involutivity::InvolutiveOnSamples
    } else {
        Involutivity::Inconclusive
    };
    Ok(InvolutivityReport {
        verdict,
        max_residual: worst,
        ranks,
        samples: pts.len(),
    })
}
