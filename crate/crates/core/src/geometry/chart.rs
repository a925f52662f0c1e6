use std::collections::HashSet;

use crate::expr::{parse_with_names, Func, ParseError, ScalarField};
use crate::sampling::Sampling;

use super::GeometryError;

/// A coordinate chart: coordinate names plus the box random samples are
/// drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    names: Vec<String>,
    sample_box: Vec<(f64, f64)>,
}

impl Chart {
    pub fn new(names: Vec<String>, sample_box: Vec<(f64, f64)>) -> Result<Chart, GeometryError> {
        if names.is_empty() {
            return Err(GeometryError::InvalidChart(
                "a chart needs at least one coordinate".into(),
            ));
        }
        if names.len() != sample_box.len() {
            return Err(GeometryError::InvalidChart(format!(
                "{} coordinate names but {} sample intervals",
                names.len(),
                sample_box.len()
            )));
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !is_identifier(n) || Func::from_name(n).is_some() {
                return Err(GeometryError::InvalidChart(format!(
                    "coordinate name `{n}` is not a usable identifier"
                )));
            }
            if !seen.insert(n.as_str()) {
                return Err(GeometryError::InvalidChart(format!(
                    "duplicate coordinate name `{n}`"
                )));
            }
        }
        for &(lo, hi) in &sample_box {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(GeometryError::InvalidChart(format!(
                    "bad sample interval [{lo}, {hi}]"
                )));
            }
        }
        Ok(Chart { names, sample_box })
    }

    /// Chart with the given names and the default box `[-1, 1]^n`.
    pub fn with_names<S: AsRef<str>>(names: &[S]) -> Result<Chart, GeometryError> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let n = names.len();
        Chart::new(names, vec![(-1.0, 1.0); n])
    }

    /// Chart with names `x1 … xn` and box `[-1, 1]^n`.
    pub fn standard(n: usize) -> Chart {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        Chart::new(names, vec![(-1.0, 1.0); n]).expect("standard chart")
    }

    pub fn with_box(mut self, sample_box: Vec<(f64, f64)>) -> Result<Chart, GeometryError> {
        self.sample_box = sample_box;
        Chart::new(self.names, self.sample_box)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn sample_box(&self) -> &[(f64, f64)] {
        &self.sample_box
    }

    pub fn samples(&self, sampling: &Sampling) -> Vec<Vec<f64>> {
        sampling.points(&self.sample_box)
    }

    /// Parses an expression against this chart's coordinate names.
    pub fn parse(&self, text: &str) -> Result<ScalarField, ParseError> {
        parse_with_names(text, &self.names)
    }

    /// The chart on T*M over this one: coordinates `x…` followed by
    /// momenta `p1 … pn`, momenta sampled from `[-1, 1]`.
    pub fn cotangent(&self) -> Chart {
        let mut names = self.names.clone();
        let mut bx = self.sample_box.clone();
        for i in 1..=self.dim() {
            let mut name = format!("p{i}");
            while self.names.contains(&name) {
                name.push('_');
            }
            names.push(name);
            bx.push((-1.0, 1.0));
        }
        Chart::new(names, bx).expect("cotangent chart")
    }
}

/// `[A-Za-z_][A-Za-z0-9_]*`, the identifiers the expression parser reads.
fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
