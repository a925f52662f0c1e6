use std::io::Write;

use crate::expr::EvalError;

use super::phase::{CotangentState, PhaseField};
use super::PwError;

/// A point of a phase space that splits into a base position and a fiber
/// part.
pub trait PhaseState: Clone {
    /// Column prefix for the fiber coordinates in CSV output.
    const FIBER: &'static str;

    fn position(&self) -> &[f64];

    fn fiber(&self) -> &[f64];
}

impl PhaseState for CotangentState {
    const FIBER: &'static str = "p";

    fn position(&self) -> &[f64] {
        &self.x
    }

    fn fiber(&self) -> &[f64] {
        &self.p
    }
}

/// A point `(x, v)` of `TM`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentState {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

impl PhaseState for TangentState {
    const FIBER: &'static str = "v";

    fn position(&self) -> &[f64] {
        &self.x
    }

    fn fiber(&self) -> &[f64] {
        &self.v
    }
}

/// A named per-step scalar. `NaN` marks steps where it is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub name: String,
    pub values: Vec<f64>,
}

impl Channel {
    /// `max − min` over the defined values.
    pub fn drift(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in self.values.iter().filter(|v| !v.is_nan()) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if lo > hi {
            0.0
        } else {
            hi - lo
        }
    }

    /// Largest defined value.
    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .filter(|v| !v.is_nan())
            .fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }
}

/// States on the uniform grid `t = k·dt`, `k = 0…steps`, with aligned
/// monitor channels.
#[derive(Debug, Clone)]
pub struct Trajectory<S: PhaseState = CotangentState> {
    base_names: Vec<String>,
    dt: f64,
    states: Vec<S>,
    channels: Vec<Channel>,
}

/// Base-space trajectory with its velocity.
pub type GeodesicTrajectory = Trajectory<TangentState>;

impl<S: PhaseState> Trajectory<S> {
    pub(crate) fn new(base_names: Vec<String>, dt: f64, states: Vec<S>) -> Trajectory<S> {
        Trajectory {
            base_names,
            dt,
            states,
            channels: Vec::new(),
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn last(&self) -> &S {
        self.states
            .last()
            .expect("a trajectory holds its initial state")
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.states.len()).map(|k| self.time(k)).collect()
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn channel(&self, name: &str) -> Option<&Channel> {
        self.channels.iter().find(|c| c.name == name)
    }

    /// Adds or replaces a channel.
    pub fn add_channel(&mut self, name: &str, values: Vec<f64>) -> Result<(), PwError> {
        if values.len() != self.states.len() {
            return Err(PwError::StateDimension {
                expected: self.states.len(),
                got: values.len(),
            });
        }
        let ch = Channel {
            name: name.to_string(),
            values,
        };
        match self.channels.iter_mut().find(|c| c.name == name) {
            Some(slot) => *slot = ch,
            None => self.channels.push(ch),
        }
        Ok(())
    }

    /// Writes `t,<base names>,<fiber names>,<channels>` with 17 significant
    /// digits. Undefined channel values are empty cells.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), PwError> {
        let mut w = csv::Writer::from_writer(out);
        let n = self.base_names.len();
        let mut header = vec!["t".to_string()];
        header.extend(self.base_names.iter().cloned());
        header.extend((1..=n).map(|i| format!("{}{i}", S::FIBER)));
        header.extend(self.channels.iter().map(|c| c.name.clone()));
        w.write_record(&header)?;
        for (k, s) in self.states.iter().enumerate() {
            let mut row = vec![cell(self.time(k))];
            row.extend(s.position().iter().chain(s.fiber()).map(|&v| cell(v)));
            row.extend(self.channels.iter().map(|c| cell(c.values[k])));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

impl Trajectory<CotangentState> {
    /// Evaluates `F` along the trajectory and stores it as a channel.
    pub fn record(&mut self, name: &str, f: &PhaseField) -> Result<(), PwError> {
        let values = self
            .states
            .iter()
            .map(|s| f.eval(s))
            .collect::<Result<Vec<f64>, EvalError>>()?;
        self.add_channel(name, values)
    }
}

fn cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.16e}")
    }
}
