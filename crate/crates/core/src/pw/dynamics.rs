use crate::expr::{EvalError, Expr};
use crate::geometry::{levi_civita_with_inverse, Connection, SymFormField};
use crate::sampling::Sampling;

use super::phase::{pw_gradient, vertical_lift, CotangentState, PhaseField, PhaseVector};
use super::trajectory::{GeodesicTrajectory, TangentState, Trajectory};
use super::PwError;

fn check_step(dt: f64, steps: usize) -> Result<(), PwError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(PwError::InvalidStep(format!(
            "dt must be positive and finite, got {dt}"
        )));
    }
    if steps == 0 {
        return Err(PwError::InvalidStep("at least one step is required".into()));
    }
    Ok(())
}

fn axpy(y: &[f64], a: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(y, k)| y + a * k).collect()
}

/// One classical Runge-Kutta step.
pub fn rk4_step<F>(f: &F, y: &[f64], dt: f64) -> Result<Vec<f64>, EvalError>
where
    F: Fn(&[f64]) -> Result<Vec<f64>, EvalError>,
{
    let k1 = f(y)?;
    let k2 = f(&axpy(y, 0.5 * dt, &k1))?;
    let k3 = f(&axpy(y, 0.5 * dt, &k2))?;
    let k4 = f(&axpy(y, dt, &k3))?;
    Ok((0..y.len())
        .map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// Fixed-step RK4 run, stopping at the first non-finite state.
fn run<F>(
    f: F,
    y0: Vec<f64>,
    dt: f64,
    steps: usize,
) -> (Vec<Vec<f64>>, Option<(usize, Option<EvalError>)>)
where
    F: Fn(&[f64]) -> Result<Vec<f64>, EvalError>,
{
    let mut ys = Vec::with_capacity(steps + 1);
    ys.push(y0);
    for step in 1..=steps {
        match rk4_step(&f, ys.last().expect("nonempty"), dt) {
            Ok(y) if y.iter().all(|v| v.is_finite()) => ys.push(y),
            Ok(_) => return (ys, Some((step, None))),
            Err(e) => return (ys, Some((step, Some(e)))),
        }
    }
    (ys, None)
}

/// Patterson-Walker dynamics `γ̇ⁱ = ∂H/∂pᵢ`,
/// `ȧⱼ = ∂H/∂xʲ + 2aₖΓᵏᵢⱼ ∂H/∂pᵢ`. Records the channel `H`.
pub fn integrate_pw(
    nabla: &Connection,
    h: &PhaseField,
    s0: &CotangentState,
    dt: f64,
    steps: usize,
) -> Result<Trajectory, PwError> {
    check_step(dt, steps)?;
    if s0.dim() != nabla.dim() || h.dim() != nabla.dim() {
        return Err(PwError::StateDimension {
            expected: nabla.dim(),
            got: s0.dim(),
        });
    }
    let grad: PhaseVector = pw_gradient(nabla, h);
    let rhs = |y: &[f64]| -> Result<Vec<f64>, EvalError> {
        grad.components().iter().map(|c| c.eval(y)).collect()
    };
    let (ys, failure) = run(rhs, s0.coords(), dt, steps);
    let states = ys.iter().map(|y| CotangentState::from_coords(y)).collect();
    let mut traj = Trajectory::new(nabla.chart().names().to_vec(), dt, states);
    traj.record("H", h)?;
    match failure {
        None => Ok(traj),
        Some((step, None)) => Err(PwError::BlowUp {
            step,
            partial: Box::new(traj),
        }),
        Some((step, Some(source))) => Err(PwError::StepEval { step, source }),
    }
}

/// `ẍᵏ + Γᵏᵢⱼẋⁱẋʲ = 0` by RK4 on `(x, v)`.
pub fn integrate_geodesic(
    nabla: &Connection,
    x0: &[f64],
    v0: &[f64],
    dt: f64,
    steps: usize,
) -> Result<GeodesicTrajectory, PwError> {
    check_step(dt, steps)?;
    let n = nabla.dim();
    if x0.len() != n || v0.len() != n {
        return Err(PwError::StateDimension {
            expected: n,
            got: x0.len().max(v0.len()),
        });
    }
    let rhs = |y: &[f64]| -> Result<Vec<f64>, EvalError> {
        let (x, v) = y.split_at(n);
        let mut out = v.to_vec();
        for k in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let g = nabla.gamma(k, i, j);
                    if !g.is_const_zero() {
                        acc += g.eval(x)? * v[i] * v[j];
                    }
                }
            }
            out.push(-acc);
        }
        Ok(out)
    };
    let mut y0 = x0.to_vec();
    y0.extend_from_slice(v0);
    let (ys, failure) = run(rhs, y0, dt, steps);
    let states = ys
        .iter()
        .map(|y| TangentState {
            x: y[..n].to_vec(),
            v: y[n..].to_vec(),
        })
        .collect();
    let traj = Trajectory::new(nabla.chart().names().to_vec(), dt, states);
    match failure {
        None => Ok(traj),
        Some((step, None)) => Err(PwError::GeodesicBlowUp {
            step,
            partial: Box::new(traj),
        }),
        Some((step, Some(source))) => Err(PwError::StepEval { step, source }),
    }
}

/// PW dynamics of `H = (g⁻¹ − f)ᵛ = ½gⁱʲpᵢpⱼ − f` under the Levi-Civita
/// connection of `g`, started at `p₀ = g(v₀)`. Records `H`, the velocity
/// channels `v1…vn` and `energy = ½g(v,v) + f`.
pub fn run_newtonian(
    g: &SymFormField,
    f: &Expr,
    x0: &[f64],
    v0: &[f64],
    dt: f64,
    steps: usize,
) -> Result<Trajectory, PwError> {
    let chart = g.chart();
    let n = chart.dim();
    if x0.len() != n || v0.len() != n {
        return Err(PwError::StateDimension {
            expected: n,
            got: x0.len().max(v0.len()),
        });
    }
    let g_inv = g.inverse(&Sampling::default())?;
    let nabla = levi_civita_with_inverse(g, &g_inv);
    let potential = PhaseField::pullback(chart, f)?;
    let h = PhaseField::new(
        chart,
        Expr::sub(vertical_lift(&g_inv).expr(), potential.expr()),
    )?;
    let gx = g.eval_at(x0)?;
    let p0: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| gx[i * n + j] * v0[j]).sum())
        .collect();
    let mut traj = integrate_pw(
        &nabla,
        &h,
        &CotangentState::new(x0.to_vec(), p0)?,
        dt,
        steps,
    )?;
    let velocity: Vec<PhaseField> = (0..n)
        .map(|i| PhaseField::new(chart, h.dp(i)))
        .collect::<Result<_, _>>()?;
    for (i, v) in velocity.iter().enumerate() {
        traj.record(&format!("v{}", i + 1), v)?;
    }
    let mut energy = Vec::with_capacity(traj.states().len());
    for s in traj.states() {
        let gx = g.eval_at(&s.x)?;
        let v: Vec<f64> = velocity
            .iter()
            .map(|c| c.eval(s))
            .collect::<Result<_, _>>()?;
        let mut e = f.eval(&s.x)?;
        for i in 0..n {
            for j in 0..n {
                e += 0.5 * gx[i * n + j] * v[i] * v[j];
            }
        }
        energy.push(e);
    }
    traj.add_channel("energy", energy)?;
    Ok(traj)
}
