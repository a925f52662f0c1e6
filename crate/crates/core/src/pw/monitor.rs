use crate::expr::EvalError;
use crate::geometry::Connection;
use crate::poisson::{characteristic_data, schouten_self, SymPoissonPair};

use super::dynamics::{integrate_geodesic, integrate_pw};
use super::phase::{vertical_lift, CotangentState, PhaseField};
use super::trajectory::{GeodesicTrajectory, Trajectory};
use super::PwError;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Rows at each end without a full five-point stencil.
const EDGE: usize = 2;

fn need_interior(states: usize) -> Result<(), PwError> {
    if states < 2 * EDGE + 1 {
        return Err(PwError::TooFewSteps {
            steps: states.saturating_sub(1),
            needed: 2 * EDGE,
        });
    }
    Ok(())
}

/// Fourth-order central difference of `f(k)` at `k`.
fn central<F: Fn(usize) -> f64>(f: F, k: usize, dt: f64) -> f64 {
    (f(k - 2) - 8.0 * f(k - 1) + 8.0 * f(k + 1) - f(k + 2)) / (12.0 * dt)
}

/// `Γᵏᵢⱼ uⁱ wʲ` at `x`.
fn gamma_contract(
    nabla: &Connection,
    x: &[f64],
    u: &[f64],
    w: &[f64],
) -> Result<Vec<f64>, EvalError> {
    let n = nabla.dim();
    let mut out = vec![0.0; n];
    for (k, o) in out.iter_mut().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let g = nabla.gamma(k, i, j);
                if !g.is_const_zero() {
                    *o += g.eval(x)? * u[i] * w[j];
                }
            }
        }
    }
    Ok(out)
}

/// `θ(ζ)` at `x`.
fn sharp_at(pair: &SymPoissonPair, x: &[f64], zeta: &[f64]) -> Result<Vec<f64>, EvalError> {
    let n = pair.dim();
    let t = pair.theta().eval_at(x)?;
    Ok((0..n)
        .map(|i| (0..n).map(|j| t[i * n + j] * zeta[j]).sum())
        .collect())
}

/// `Sq_θ = θ(a, a)` along a trajectory.
pub fn monitor_speed_square(pair: &SymPoissonPair, traj: &Trajectory) -> Result<Vec<f64>, PwError> {
    traj.states()
        .iter()
        .map(|s| {
            let v = sharp_at(pair, &s.x, &s.p)?;
            Ok(v.iter().zip(&s.p).map(|(a, b)| a * b).sum())
        })
        .collect()
}

/// `a(γ̇)` with `γ̇ = ∂H/∂p`.
pub fn monitor_momentum_on_velocity(
    h: &PhaseField,
    traj: &Trajectory,
) -> Result<Vec<f64>, PwError> {
    let hp: Vec<PhaseField> = (0..h.dim())
        .map(|i| PhaseField::new(h.base(), h.dp(i)))
        .collect::<Result<_, _>>()?;
    traj.states()
        .iter()
        .map(|s| {
            let mut acc = 0.0;
            for (i, f) in hp.iter().enumerate() {
                acc += s.p[i] * f.eval(s)?;
            }
            Ok(acc)
        })
        .collect()
}

/// Both sides of `∇_{γ̇}γ̇ = ¼ιₐιₐ[θ,θ]_s` along a run of `H = θᵛ`.
#[derive(Debug, Clone)]
pub struct GeodesicResidual {
    /// `‖∇_{γ̇}γ̇ − ¼ιₐιₐ[θ,θ]_s‖` per step.
    pub residual: Vec<f64>,
    /// `‖¼ιₐιₐ[θ,θ]_s‖` per step.
    pub predicted: Vec<f64>,
}

impl GeodesicResidual {
    pub fn max_residual(&self) -> f64 {
        self.residual
            .iter()
            .filter(|v| !v.is_nan())
            .fold(0.0, |m, &v| m.max(v))
    }

    pub fn max_predicted(&self) -> f64 {
        self.predicted
            .iter()
            .filter(|v| !v.is_nan())
            .fold(0.0, |m, &v| m.max(v))
    }
}

/// Compares the covariant acceleration of `γ̇ = θ(a)`, by fourth-order
/// central differences, with `¼ aᵢaⱼ[θ,θ]^{ijk}`. The two rows at each end are `NaN`.
pub fn monitor_geodesic_residual(
    pair: &SymPoissonPair,
    traj: &Trajectory,
) -> Result<GeodesicResidual, PwError> {
    let states = traj.states();
    need_interior(states.len())?;
    let n = pair.dim();
    let sch = schouten_self(pair)?;
    let vel: Vec<Vec<f64>> = states
        .iter()
        .map(|s| sharp_at(pair, &s.x, &s.p))
        .collect::<Result<_, _>>()?;
    let mut residual = vec![f64::NAN; states.len()];
    let mut predicted = vec![f64::NAN; states.len()];
    for k in EDGE..states.len() - EDGE {
        let s = &states[k];
        let acc: Vec<f64> = (0..n)
            .map(|m| central(|i| vel[i][m], k, traj.dt()))
            .collect();
        let gvv = gamma_contract(pair.nabla(), &s.x, &vel[k], &vel[k])?;
        let t = sch.eval_at(&s.x)?;
        let mut rhs = vec![0.0; n];
        for (m, r) in rhs.iter_mut().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    *r += 0.25 * s.p[i] * s.p[j] * t[(i * n + j) * n + m];
                }
            }
        }
        let diff: Vec<f64> = (0..n).map(|m| acc[m] + gvv[m] - rhs[m]).collect();
        residual[k] = norm(&diff);
        predicted[k] = norm(&rhs);
    }
    Ok(GeodesicResidual {
        residual,
        predicted,
    })
}

/// `‖∇_{γ̇}γ̇‖` along a geodesic run, from central differences of the
/// velocity. The two rows at each end are `NaN`.
pub fn monitor_geodesic_equation(
    nabla: &Connection,
    traj: &GeodesicTrajectory,
) -> Result<Vec<f64>, PwError> {
    let states = traj.states();
    need_interior(states.len())?;
    let n = nabla.dim();
    let mut out = vec![f64::NAN; states.len()];
    for k in EDGE..states.len() - EDGE {
        let s = &states[k];
        let gvv = gamma_contract(nabla, &s.x, &s.v, &s.v)?;
        let r: Vec<f64> = (0..n)
            .map(|m| central(|i| states[i].v[m], k, traj.dt()) + gvv[m])
            .collect();
        out[k] = norm(&r);
    }
    Ok(out)
}

/// `‖∇_{γ̇}a‖ = ‖ȧⱼ − Γᵏᵢⱼγ̇ⁱaₖ‖` along a PW run, both derivatives by
/// central differences. The two rows at each end are `NaN`.
pub fn monitor_parallel_transport(
    nabla: &Connection,
    traj: &Trajectory,
) -> Result<Vec<f64>, PwError> {
    let states = traj.states();
    need_interior(states.len())?;
    let n = nabla.dim();
    let dt = traj.dt();
    let mut out = vec![f64::NAN; states.len()];
    for k in EDGE..states.len() - EDGE {
        let s = &states[k];
        let xdot: Vec<f64> = (0..n).map(|i| central(|q| states[q].x[i], k, dt)).collect();
        let mut r = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = central(|q| states[q].p[j], k, dt);
            for i in 0..n {
                for kk in 0..n {
                    let g = nabla.gamma(kk, i, j);
                    if !g.is_const_zero() {
                        acc -= g.eval(&s.x)? * xdot[i] * s.p[kk];
                    }
                }
            }
            r.push(acc);
        }
        out[k] = norm(&r);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct InvarianceReport {
    /// Largest `‖γ_PW(t) − γ_geo(t)‖` over the grid.
    pub max_base_distance: f64,
    /// Largest distance of the geodesic velocity to `im θ` at its base point.
    pub max_image_distance: f64,
    pub steps: usize,
}

/// Launches `grad_∇θᵛ` from `(x₀, ζ₀)` and the `∇`-geodesic from
/// `(x₀, θ(ζ₀))`, then compares the base curves and measures how far the
/// geodesic velocity leaves `im θ`.
pub fn check_locally_geodesically_invariant(
    pair: &SymPoissonPair,
    x0: &[f64],
    zeta0: &[f64],
    dt: f64,
    steps: usize,
) -> Result<InvarianceReport, PwError> {
    let v0 = sharp_at(pair, x0, zeta0)?;
    if norm(&v0) <= 1e-12 {
        return Err(PwError::InvalidInput("θ(ζ₀) vanishes".into()));
    }
    let h = vertical_lift(pair.theta());
    let s0 = CotangentState::new(x0.to_vec(), zeta0.to_vec())?;
    let pw = integrate_pw(pair.nabla(), &h, &s0, dt, steps)?;
    let geo = integrate_geodesic(pair.nabla(), x0, &v0, dt, steps)?;
    let mut base = 0.0f64;
    let mut image = 0.0f64;
    for (a, b) in pw.states().iter().zip(geo.states()) {
        let d: Vec<f64> = a.x.iter().zip(&b.x).map(|(p, q)| p - q).collect();
        base = base.max(norm(&d));
        let data = characteristic_data(pair.theta(), &b.x)?;
        image = image.max(data.distance_to_image(&b.v));
    }
    Ok(InvarianceReport {
        max_base_distance: base,
        max_image_distance: image,
        steps,
    })
}
