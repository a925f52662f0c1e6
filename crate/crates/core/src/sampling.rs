//! Sampled zero testing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{EvalError, Expr};

pub const DEFAULT_SEED: u64 = 0x5EED;
pub const DEFAULT_COUNT: usize = 25;
pub const DEFAULT_TOL: f64 = 1e-9;

/// Sampling protocol shared by every sampled verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling {
    pub count: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            count: DEFAULT_COUNT,
            seed: DEFAULT_SEED,
            tol: DEFAULT_TOL,
        }
    }
}

impl Sampling {
    pub fn with_tol(self, tol: f64) -> Sampling {
        Sampling { tol, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Sampling {
        Sampling { seed, ..self }
    }

    pub fn with_count(self, count: usize) -> Sampling {
        Sampling { count, ..self }
    }

    /// Uniform points in the box `bounds`.
    pub fn points(&self, bounds: &[(f64, f64)]) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.count)
            .map(|_| {
                bounds
                    .iter()
                    .map(|&(lo, hi)| if lo < hi { rng.gen_range(lo..hi) } else { lo })
                    .collect()
            })
            .collect()
    }
}

/// Outcome of a sampled check.
///
/// `max_residual` is the largest normalized residual `|v| / (1 + scale)`
/// seen, so `holds` is exactly `max_residual <= tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub holds: bool,
    pub max_residual: f64,
    pub samples: usize,
}

impl Verdict {
    pub fn trivially_true(samples: usize) -> Verdict {
        Verdict {
            holds: true,
            max_residual: 0.0,
            samples,
        }
    }

    /// Conjunction of two verdicts on the same samples.
    pub fn and(self, other: Verdict) -> Verdict {
        Verdict {
            holds: self.holds && other.holds,
            max_residual: self.max_residual.max(other.max_residual),
            samples: self.samples.max(other.samples),
        }
    }
}

/// Tests whether every expression vanishes at every point.
pub fn check_zero<'a, I>(exprs: I, points: &[Vec<f64>], tol: f64) -> Result<Verdict, EvalError>
where
    I: IntoIterator<Item = &'a Expr>,
{
    let mut worst: f64 = 0.0;
    for e in exprs {
        if e.is_const_zero() {
            continue;
        }
        for x in points {
            let (v, scale) = e.eval_scaled(x)?;
            let r = v.abs() / (1.0 + scale);
            // NaN is sticky so a non-finite evaluation can never pass.
            if r.is_nan() || r > worst {
                worst = r;
            }
        }
    }
    Ok(Verdict {
        holds: worst <= tol,
        max_residual: worst,
        samples: points.len(),
    })
}

/// Largest absolute value of an expression family over the points.
pub fn max_abs<'a, I>(exprs: I, points: &[Vec<f64>]) -> Result<f64, EvalError>
where
    I: IntoIterator<Item = &'a Expr>,
{
    let mut worst: f64 = 0.0;
    for e in exprs {
        for x in points {
            worst = worst.max(e.eval(x)?.abs());
        }
    }
    Ok(worst)
}
