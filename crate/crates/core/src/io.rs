//! Line-based structure files.
//!
//! ```text
//! # comment
//! [chart]
//! names = x, y
//! box = -1 1, -1 1
//!
//! [theta]
//! theta[1,1] = "1 + y^2"
//!
//! [connection]
//! gamma[1,1,2] = "1"        # Γ¹₁₂ = Γ¹₂₁
//! # or: metric[1,1] = "..." for the Levi-Civita connection
//!
//! [dynamics]
//! hamiltonian = theta       # or an expression in the names and p1..pn
//! x0 = 0, 0
//! p0 = 1, 0
//! dt = 0.001
//! steps = 1000
//! monitors = H, speed
//!
//! [expect]
//! sp = true
//! strong = true
//! parallel = false
//! involutive = true         # or false, inconclusive
//! ranks = 1, 1              # one per probe
//!
//! [probe]
//! point = 0.5, 0.5
//!
//! [sampling]
//! seed = 24301
//! count = 25
//! tol = 1e-9
//! ```
//!
//! Indices are 1-based in the file and 0-based in memory. A `catalog`
//! key in `[chart]` (`jj:<id>` or `liealg:<id>`) replaces the chart,
//! `[theta]` and `[connection]` sections.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use thiserror::Error;

use crate::exact::Rat;
use crate::geometry::{levi_civita, Chart, Connection, SymFormField, SymTensorField};
use crate::jj::{self, CommutativeAlgebra};
use crate::liealg;
use crate::poisson::{Involutivity, SymPoissonPair};
use crate::sampling::Sampling;

#[derive(Debug, Clone, Error, PartialEq)]
#[error("line {line}: {message}")]
pub struct IoError {
    /// 1-based line, 0 when the problem concerns the whole file.
    pub line: usize,
    pub message: String,
}

impl IoError {
    fn new(line: usize, message: impl Into<String>) -> IoError {
        IoError {
            line,
            message: message.into(),
        }
    }
}

/// A reference into one of the shipped catalogs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CatalogRef {
    Jj(String),
    LieAlg(String),
}

impl CatalogRef {
    /// Parses `jj:<id>` or `liealg:<id>`; the id must exist.
    pub fn parse(text: &str) -> Result<CatalogRef, IoError> {
        let text = text.trim();
        let (kind, id) = text
            .split_once(':')
            .ok_or_else(|| IoError::new(0, format!("catalog reference `{text}` lacks a prefix")))?;
        let id = id.trim();
        match kind.trim() {
            "jj" => {
                jj::catalog_entry(id).map_err(|e| IoError::new(0, e.to_string()))?;
                Ok(CatalogRef::Jj(id.to_string()))
            }
            "liealg" => {
                liealg::li_catalog_entry(id).map_err(|e| IoError::new(0, e.to_string()))?;
                Ok(CatalogRef::LieAlg(id.to_string()))
            }
            other => Err(IoError::new(0, format!("unknown catalog `{other}`"))),
        }
    }

    pub fn id(&self) -> &str {
        match self {
            CatalogRef::Jj(id) | CatalogRef::LieAlg(id) => id,
        }
    }
}

impl fmt::Display for CatalogRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogRef::Jj(id) => write!(f, "jj:{id}"),
            CatalogRef::LieAlg(id) => write!(f, "liealg:{id}"),
        }
    }
}

/// Sparse connection data; keys are 0-based with sorted lower indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ConnectionSpec {
    #[default]
    Flat,
    /// `Γᵏᵢⱼ` keyed by `[k, i, j]`, `i ≤ j`.
    Christoffel(BTreeMap<[usize; 3], String>),
    /// Metric components keyed by `[i, j]`, `i ≤ j`.
    LeviCivita(BTreeMap<[usize; 2], String>),
}

/// The Hamiltonian keyword for `θᵛ`.
pub const THETA_HAMILTONIAN: &str = "theta";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DynamicsSpec {
    pub hamiltonian: Option<String>,
    pub x0: Option<Vec<f64>>,
    pub p0: Option<Vec<f64>>,
    pub dt: Option<f64>,
    pub steps: Option<usize>,
    pub monitors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Expectations {
    pub symmetric_poisson: Option<bool>,
    pub strong: Option<bool>,
    pub parallel: Option<bool>,
    pub involutive: Option<Involutivity>,
    /// Rank of `θ` at each probe point.
    pub ranks: Option<Vec<usize>>,
}

impl Expectations {
    pub fn is_empty(&self) -> bool {
        *self == Expectations::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SamplingSpec {
    pub seed: Option<u64>,
    pub count: Option<usize>,
    pub tol: Option<f64>,
}

impl SamplingSpec {
    /// Fills unset fields from `base`.
    pub fn apply(&self, base: Sampling) -> Sampling {
        Sampling {
            count: self.count.unwrap_or(base.count),
            seed: self.seed.unwrap_or(base.seed),
            tol: self.tol.unwrap_or(base.tol),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StructureFile {
    pub names: Vec<String>,
    pub sample_box: Option<Vec<(f64, f64)>>,
    pub catalog: Option<CatalogRef>,
    /// `θⁱʲ` keyed by `[i, j]`, `i ≤ j`.
    pub theta: BTreeMap<[usize; 2], String>,
    pub connection: ConnectionSpec,
    pub dynamics: DynamicsSpec,
    pub expect: Expectations,
    pub probes: Vec<Vec<f64>>,
    pub sampling: SamplingSpec,
}

/// A built structure: the pair, plus the metric when the connection is
/// its Levi-Civita connection.
#[derive(Debug, Clone)]
pub struct Structure {
    pub pair: SymPoissonPair,
    pub metric: Option<SymFormField>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Chart,
    Theta,
    Connection,
    Dynamics,
    Expect,
    Probe,
    Sampling,
}

impl Section {
    fn parse(name: &str) -> Option<Section> {
        Some(match name {
            "chart" => Section::Chart,
            "theta" => Section::Theta,
            "connection" => Section::Connection,
            "dynamics" => Section::Dynamics,
            "expect" => Section::Expect,
            "probe" => Section::Probe,
            "sampling" => Section::Sampling,
            _ => return None,
        })
    }
}

/// Strips a trailing `#` comment that is not inside quotes.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, ch) in line.char_indices() {
        match ch {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn unquote(value: &str, line: usize) -> Result<String, IoError> {
    let v = value.trim();
    if let Some(rest) = v.strip_prefix('"') {
        let inner = rest
            .strip_suffix('"')
            .ok_or_else(|| IoError::new(line, "unterminated string"))?;
        if inner.contains('"') {
            return Err(IoError::new(line, "stray quote in string"));
        }
        Ok(inner.to_string())
    } else if v.contains('"') {
        Err(IoError::new(line, "stray quote in value"))
    } else {
        Ok(v.to_string())
    }
}

/// Splits `name[1,2]` into the name and 0-based indices.
fn parse_key(key: &str, line: usize) -> Result<(String, Option<Vec<usize>>), IoError> {
    let key = key.trim();
    let Some(open) = key.find('[') else {
        return Ok((key.to_string(), None));
    };
    let inner = key[open + 1..]
        .strip_suffix(']')
        .ok_or_else(|| IoError::new(line, format!("malformed key `{key}`")))?;
    let idx = inner
        .split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(0) | Err(_) => Err(IoError::new(
                line,
                format!("index `{}` in `{key}` is not a positive integer", t.trim()),
            )),
            Ok(v) => Ok(v - 1),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((key[..open].trim().to_string(), Some(idx)))
}

/// Parses a comma-separated list of finite numbers, optionally wrapped
/// in brackets: `1, -0.5` or `[1, -0.5]`.
pub fn parse_point_list(text: &str) -> Result<Vec<f64>, IoError> {
    let t = text.trim();
    let t = match t.strip_prefix('[') {
        Some(rest) => rest
            .strip_suffix(']')
            .ok_or_else(|| IoError::new(0, "unbalanced bracket in list"))?,
        None => t,
    };
    if t.trim().is_empty() {
        return Err(IoError::new(0, "empty list"));
    }
    t.split(',')
        .map(|s| {
            let s = s.trim();
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(IoError::new(0, format!("`{s}` is not a finite number"))),
            }
        })
        .collect()
}

fn parse_bool(value: &str, line: usize) -> Result<bool, IoError> {
    match value {
        "true" | "yes" => Ok(true),
        "false" | "no" => Ok(false),
        _ => Err(IoError::new(
            line,
            format!("expected true or false, got `{value}`"),
        )),
    }
}

fn parse_involutivity(value: &str, line: usize) -> Result<Involutivity, IoError> {
    match value {
        "true" | "involutive" | "involutive_on_samples" => Ok(Involutivity::InvolutiveOnSamples),
        "false" | "not_involutive" => Ok(Involutivity::NotInvolutive),
        "inconclusive" => Ok(Involutivity::Inconclusive),
        _ => Err(IoError::new(
            line,
            format!("expected true, false or inconclusive, got `{value}`"),
        )),
    }
}

fn parse_box(value: &str, line: usize) -> Result<Vec<(f64, f64)>, IoError> {
    value
        .split(',')
        .map(|pair| {
            let nums: Vec<&str> = pair.split_whitespace().collect();
            let parsed: Option<Vec<f64>> = nums.iter().map(|s| s.parse::<f64>().ok()).collect();
            match parsed.as_deref() {
                Some(&[lo, hi]) if lo.is_finite() && hi.is_finite() && lo < hi => Ok((lo, hi)),
                _ => Err(IoError::new(
                    line,
                    format!("box entry `{}` is not `lo hi` with lo < hi", pair.trim()),
                )),
            }
        })
        .collect()
}

fn with_line<T>(r: Result<T, IoError>, line: usize) -> Result<T, IoError> {
    r.map_err(|e| IoError::new(line, e.message))
}

fn insert_unique<K: Ord + fmt::Debug, V>(
    map: &mut BTreeMap<K, V>,
    key: K,
    value: V,
    line: usize,
) -> Result<(), IoError> {
    if map.contains_key(&key) {
        return Err(IoError::new(line, format!("duplicate entry {key:?}")));
    }
    map.insert(key, value);
    Ok(())
}

fn set_once<T>(slot: &mut Option<T>, value: T, key: &str, line: usize) -> Result<(), IoError> {
    if slot.is_some() {
        return Err(IoError::new(line, format!("duplicate key `{key}`")));
    }
    *slot = Some(value);
    Ok(())
}

/// Accumulates raw entries with their line numbers for later validation.
#[derive(Default)]
struct Raw {
    names: Option<(Vec<String>, usize)>,
    sample_box: Option<(Vec<(f64, f64)>, usize)>,
    catalog: Option<(CatalogRef, usize)>,
    theta: BTreeMap<[usize; 2], (String, usize)>,
    gamma: BTreeMap<[usize; 3], (String, usize)>,
    metric: BTreeMap<[usize; 2], (String, usize)>,
    hamiltonian: Option<(String, usize)>,
    probes: Vec<(Vec<f64>, usize)>,
    x0: Option<(Vec<f64>, usize)>,
    p0: Option<(Vec<f64>, usize)>,
    ranks: Option<(Vec<usize>, usize)>,
}

fn sorted2(idx: &[usize]) -> [usize; 2] {
    [idx[0].min(idx[1]), idx[0].max(idx[1])]
}

impl StructureFile {
    /// Parses and validates a structure file.
    pub fn parse(text: &str) -> Result<StructureFile, IoError> {
        let mut out = StructureFile::default();
        let mut raw = Raw::default();
        let mut section: Option<Section> = None;
        for (lineno, full) in text.lines().enumerate() {
            let line = lineno + 1;
            let body = strip_comment(full).trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| IoError::new(line, format!("malformed section `{body}`")))?;
                section = Some(
                    Section::parse(name.trim())
                        .ok_or_else(|| IoError::new(line, format!("unknown section `{name}`")))?,
                );
                continue;
            }
            let sec = section.ok_or_else(|| IoError::new(line, "entry before any section"))?;
            let (key, value) = body.split_once('=').ok_or_else(|| {
                IoError::new(line, format!("expected `key = value`, got `{body}`"))
            })?;
            let (name, idx) = parse_key(key, line)?;
            let value = unquote(value, line)?;
            out.parse_entry(&mut raw, sec, &name, idx, &value, line)?;
        }
        out.finish(raw)?;
        Ok(out)
    }

    fn parse_entry(
        &mut self,
        raw: &mut Raw,
        sec: Section,
        name: &str,
        idx: Option<Vec<usize>>,
        value: &str,
        line: usize,
    ) -> Result<(), IoError> {
        let unknown = || IoError::new(line, format!("unknown key `{name}` in this section"));
        let need_plain = |idx: &Option<Vec<usize>>| match idx {
            Some(_) => Err(IoError::new(line, format!("`{name}` takes no indices"))),
            None => Ok(()),
        };
        let need_arity = |idx: Option<Vec<usize>>, k: usize| match idx {
            Some(v) if v.len() == k => Ok(v),
            _ => Err(IoError::new(line, format!("`{name}` needs {k} indices"))),
        };
        match sec {
            Section::Chart => {
                need_plain(&idx)?;
                match name {
                    "names" => {
                        let names: Vec<String> =
                            value.split(',').map(|s| s.trim().to_string()).collect();
                        set_once(&mut raw.names, (names, line), name, line)?;
                    }
                    "box" => set_once(
                        &mut raw.sample_box,
                        (parse_box(value, line)?, line),
                        name,
                        line,
                    )?,
                    "catalog" => {
                        let r = with_line(CatalogRef::parse(value), line)?;
                        set_once(&mut raw.catalog, (r, line), name, line)?;
                    }
                    _ => return Err(unknown()),
                }
            }
            Section::Theta => {
                if name != "theta" {
                    return Err(unknown());
                }
                let idx = need_arity(idx, 2)?;
                insert_unique(
                    &mut raw.theta,
                    sorted2(&idx),
                    (value.to_string(), line),
                    line,
                )?;
            }
            Section::Connection => match name {
                "gamma" => {
                    let idx = need_arity(idx, 3)?;
                    let [i, j] = sorted2(&idx[1..]);
                    insert_unique(
                        &mut raw.gamma,
                        [idx[0], i, j],
                        (value.to_string(), line),
                        line,
                    )?;
                }
                "metric" => {
                    let idx = need_arity(idx, 2)?;
                    insert_unique(
                        &mut raw.metric,
                        sorted2(&idx),
                        (value.to_string(), line),
                        line,
                    )?;
                }
                _ => return Err(unknown()),
            },
            Section::Dynamics => {
                need_plain(&idx)?;
                let d = &mut self.dynamics;
                match name {
                    "hamiltonian" => {
                        set_once(&mut raw.hamiltonian, (value.to_string(), line), name, line)?
                    }
                    "x0" => set_once(
                        &mut raw.x0,
                        (with_line(parse_point_list(value), line)?, line),
                        name,
                        line,
                    )?,
                    "p0" => set_once(
                        &mut raw.p0,
                        (with_line(parse_point_list(value), line)?, line),
                        name,
                        line,
                    )?,
                    "dt" => {
                        let dt = value
                            .parse::<f64>()
                            .ok()
                            .filter(|v| v.is_finite() && *v > 0.0)
                            .ok_or_else(|| IoError::new(line, "dt must be a positive number"))?;
                        set_once(&mut d.dt, dt, name, line)?;
                    }
                    "steps" => {
                        let s =
                            value
                                .parse::<usize>()
                                .ok()
                                .filter(|&s| s > 0)
                                .ok_or_else(|| {
                                    IoError::new(line, "steps must be a positive integer")
                                })?;
                        set_once(&mut d.steps, s, name, line)?;
                    }
                    "monitors" => {
                        if !d.monitors.is_empty() {
                            return Err(IoError::new(line, "duplicate key `monitors`"));
                        }
                        d.monitors = value
                            .split(',')
                            .map(|s| s.trim().to_string())
                            .filter(|s| !s.is_empty())
                            .collect();
                        if d.monitors.is_empty() {
                            return Err(IoError::new(line, "empty monitor list"));
                        }
                    }
                    _ => return Err(unknown()),
                }
            }
            Section::Expect => {
                need_plain(&idx)?;
                let e = &mut self.expect;
                match name {
                    "sp" | "symmetric_poisson" => set_once(
                        &mut e.symmetric_poisson,
                        parse_bool(value, line)?,
                        name,
                        line,
                    )?,
                    "strong" => set_once(&mut e.strong, parse_bool(value, line)?, name, line)?,
                    "parallel" => set_once(&mut e.parallel, parse_bool(value, line)?, name, line)?,
                    "involutive" => set_once(
                        &mut e.involutive,
                        parse_involutivity(value, line)?,
                        name,
                        line,
                    )?,
                    "ranks" => {
                        let ranks = value
                            .split(',')
                            .map(|s| s.trim().parse::<usize>())
                            .collect::<Result<Vec<_>, _>>()
                            .map_err(|_| {
                                IoError::new(line, "ranks must be non-negative integers")
                            })?;
                        set_once(&mut raw.ranks, (ranks, line), name, line)?;
                    }
                    _ => return Err(unknown()),
                }
            }
            Section::Probe => {
                need_plain(&idx)?;
                if name != "point" {
                    return Err(unknown());
                }
                raw.probes
                    .push((with_line(parse_point_list(value), line)?, line));
            }
            Section::Sampling => {
                need_plain(&idx)?;
                let s = &mut self.sampling;
                match name {
                    "seed" => {
                        let v = parse_seed(value).ok_or_else(|| {
                            IoError::new(line, "seed must be an unsigned integer")
                        })?;
                        set_once(&mut s.seed, v, name, line)?;
                    }
                    "count" => {
                        let v =
                            value
                                .parse::<usize>()
                                .ok()
                                .filter(|&c| c > 0)
                                .ok_or_else(|| {
                                    IoError::new(line, "count must be a positive integer")
                                })?;
                        set_once(&mut s.count, v, name, line)?;
                    }
                    "tol" => {
                        let v = value
                            .parse::<f64>()
                            .ok()
                            .filter(|v| v.is_finite() && *v > 0.0)
                            .ok_or_else(|| IoError::new(line, "tol must be a positive number"))?;
                        set_once(&mut s.tol, v, name, line)?;
                    }
                    _ => return Err(unknown()),
                }
            }
        }
        Ok(())
    }

    fn finish(&mut self, raw: Raw) -> Result<(), IoError> {
        match (raw.catalog, raw.names) {
            (Some((_, line)), Some(_)) => {
                return Err(IoError::new(
                    line,
                    "a catalog reference fixes the chart; drop `names`",
                ));
            }
            (Some((cat, line)), None) => {
                if let Some((_, l)) = raw.sample_box {
                    return Err(IoError::new(l, "a catalog reference fixes the sample box"));
                }
                let fixed = raw
                    .theta
                    .values()
                    .map(|v| v.1)
                    .chain(raw.gamma.values().map(|v| v.1))
                    .chain(raw.metric.values().map(|v| v.1))
                    .min();
                if let Some(l) = fixed {
                    return Err(IoError::new(
                        l,
                        "a catalog reference fixes theta and the connection",
                    ));
                }
                let chart = with_line(catalog_chart(&cat), line)?;
                self.names = chart.names().to_vec();
                self.catalog = Some(cat);
            }
            (None, Some((names, line))) => {
                let n = names.len();
                let bx = match &raw.sample_box {
                    Some((b, l)) if b.len() != n => {
                        return Err(IoError::new(
                            *l,
                            format!("box has {} entries for {n} coordinates", b.len()),
                        ));
                    }
                    Some((b, _)) => b.clone(),
                    None => vec![(-1.0, 1.0); n],
                };
                Chart::new(names.clone(), bx).map_err(|e| IoError::new(line, e.to_string()))?;
                if names.iter().any(|s| is_momentum_name(s, n)) {
                    return Err(IoError::new(line, "coordinate names p1..pn are reserved"));
                }
                self.names = names;
                self.sample_box = raw.sample_box.map(|(b, _)| b);
            }
            (None, None) => return Err(IoError::new(0, "missing [chart] names or catalog")),
        }
        let n = self.names.len();
        let chart = Chart::new(self.names.clone(), vec![(-1.0, 1.0); n])
            .map_err(|e| IoError::new(0, e.to_string()))?;
        let check_expr = |text: &str, line: usize| -> Result<(), IoError> {
            chart
                .parse(text)
                .map(|_| ())
                .map_err(|e| IoError::new(line, format!("in `{text}`: {e}")))
        };
        let check_range = |idx: &[usize], line: usize| -> Result<(), IoError> {
            if idx.iter().any(|&i| i >= n) {
                let shown: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
                return Err(IoError::new(
                    line,
                    format!("index [{}] out of range for dimension {n}", shown.join(",")),
                ));
            }
            Ok(())
        };
        for (k, (v, line)) in &raw.theta {
            check_range(k, *line)?;
            check_expr(v, *line)?;
        }
        for (k, (v, line)) in &raw.gamma {
            check_range(k, *line)?;
            check_expr(v, *line)?;
        }
        for (k, (v, line)) in &raw.metric {
            check_range(k, *line)?;
            check_expr(v, *line)?;
        }
        if !raw.gamma.is_empty() && !raw.metric.is_empty() {
            let line = raw.metric.values().map(|v| v.1).min().unwrap_or(0);
            return Err(IoError::new(
                line,
                "give either gamma or metric entries, not both",
            ));
        }
        self.theta = raw.theta.into_iter().map(|(k, v)| (k, v.0)).collect();
        self.connection = if !raw.gamma.is_empty() {
            ConnectionSpec::Christoffel(raw.gamma.into_iter().map(|(k, v)| (k, v.0)).collect())
        } else if !raw.metric.is_empty() {
            ConnectionSpec::LeviCivita(raw.metric.into_iter().map(|(k, v)| (k, v.0)).collect())
        } else {
            ConnectionSpec::Flat
        };
        if let Some((h, line)) = raw.hamiltonian {
            if h != THETA_HAMILTONIAN {
                chart
                    .cotangent()
                    .parse(&h)
                    .map_err(|e| IoError::new(line, format!("in `{h}`: {e}")))?;
            }
            self.dynamics.hamiltonian = Some(h);
        }
        for (slot, value) in [
            (&mut self.dynamics.x0, raw.x0),
            (&mut self.dynamics.p0, raw.p0),
        ] {
            if let Some((v, line)) = value {
                if v.len() != n {
                    return Err(IoError::new(
                        line,
                        format!("expected {n} entries, got {}", v.len()),
                    ));
                }
                *slot = Some(v);
            }
        }
        for (p, line) in raw.probes {
            if p.len() != n {
                return Err(IoError::new(
                    line,
                    format!("expected {n} entries, got {}", p.len()),
                ));
            }
            self.probes.push(p);
        }
        if let Some((ranks, line)) = raw.ranks {
            if ranks.len() != self.probes.len() {
                return Err(IoError::new(
                    line,
                    format!(
                        "{} ranks for {} probe points",
                        ranks.len(),
                        self.probes.len()
                    ),
                ));
            }
            if ranks.iter().any(|&r| r > n) {
                return Err(IoError::new(line, format!("rank exceeds dimension {n}")));
            }
            self.expect.ranks = Some(ranks);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// The declared chart, or the catalog's.
    pub fn chart(&self) -> Result<Arc<Chart>, IoError> {
        if let Some(cat) = &self.catalog {
            return catalog_chart(cat).map(Arc::new);
        }
        let n = self.dim();
        let bx = self
            .sample_box
            .clone()
            .unwrap_or_else(|| vec![(-1.0, 1.0); n]);
        Chart::new(self.names.clone(), bx)
            .map(Arc::new)
            .map_err(|e| IoError::new(0, e.to_string()))
    }

    /// Builds the pair. Torsion is rejected by construction since only
    /// symmetric Christoffel symbols can be written.
    pub fn build(&self, sampling: &Sampling) -> Result<Structure, IoError> {
        let err = |e: &dyn fmt::Display| IoError::new(0, e.to_string());
        if let Some(cat) = &self.catalog {
            return build_catalog(cat);
        }
        let chart = self.chart()?;
        let parse = |text: &str| {
            chart
                .parse(text)
                .map(|f| f.into_expr())
                .map_err(|e| IoError::new(0, format!("in `{text}`: {e}")))
        };
        let mut theta = SymTensorField::zero(&chart, 2).map_err(|e| err(&e))?;
        for ([i, j], text) in &self.theta {
            theta = theta
                .with_component(&[*i, *j], parse(text)?)
                .map_err(|e| err(&e))?;
        }
        let (nabla, metric) = match &self.connection {
            ConnectionSpec::Flat => (Connection::euclidean(&chart).torsion_free_part(), None),
            ConnectionSpec::Christoffel(g) => {
                let mut conn = Connection::euclidean(&chart);
                for ([k, i, j], text) in g {
                    conn = conn
                        .with_symmetric(*k, *i, *j, parse(text)?)
                        .map_err(|e| err(&e))?;
                }
                (conn.torsion_free(sampling).map_err(|e| err(&e))?, None)
            }
            ConnectionSpec::LeviCivita(m) => {
                let mut g = SymFormField::zero(&chart, 2).map_err(|e| err(&e))?;
                for ([i, j], text) in m {
                    g = g
                        .with_component(&[*i, *j], parse(text)?)
                        .map_err(|e| err(&e))?;
                }
                (levi_civita(&g, sampling).map_err(|e| err(&e))?, Some(g))
            }
        };
        let pair = SymPoissonPair::new(theta, nabla).map_err(|e| err(&e))?;
        Ok(Structure { pair, metric })
    }

    /// A file for the linear structure of a commutative algebra, with
    /// coefficients written as exact fractions.
    pub fn from_jj(alg: &CommutativeAlgebra) -> StructureFile {
        let n = alg.dim();
        let names = jj::chart_names(n);
        let mut theta = BTreeMap::new();
        for i in 0..n {
            for j in i..n {
                let terms: Vec<String> = (0..n)
                    .filter(|&k| !num_traits::Zero::is_zero(alg.constant(k, i, j)))
                    .map(|k| format!("({})*{}", fraction(alg.constant(k, i, j)), names[k]))
                    .collect();
                if !terms.is_empty() {
                    theta.insert([i, j], terms.join(" + "));
                }
            }
        }
        StructureFile {
            names,
            theta,
            ..StructureFile::default()
        }
    }
}

fn fraction(r: &Rat) -> String {
    if r.denom() == &num_bigint::BigInt::from(1) {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_seed(value: &str) -> Option<u64> {
    match value
        .strip_prefix("0x")
        .or_else(|| value.strip_prefix("0X"))
    {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => value.parse().ok(),
    }
}

fn is_momentum_name(name: &str, n: usize) -> bool {
    name.strip_prefix('p')
        .and_then(|d| d.parse::<usize>().ok())
        .is_some_and(|i| (1..=n).contains(&i))
}

fn catalog_chart(cat: &CatalogRef) -> Result<Chart, IoError> {
    let s = build_catalog(cat)?;
    Ok((**s.pair.chart()).clone())
}

fn build_catalog(cat: &CatalogRef) -> Result<Structure, IoError> {
    let err = |e: &dyn fmt::Display| IoError::new(0, e.to_string());
    match cat {
        CatalogRef::Jj(id) => {
            let entry = jj::catalog_entry(id).map_err(|e| err(&e))?;
            Ok(Structure {
                pair: jj::to_linear_structure(&entry.algebra),
                metric: None,
            })
        }
        CatalogRef::LieAlg(id) => {
            let entry = liealg::li_catalog_entry(id).map_err(|e| err(&e))?;
            let (_, frame) = liealg::coordinate_frame(entry.algebra_id).map_err(|e| err(&e))?;
            let theta = frame.export_tensor(&entry.theta).map_err(|e| err(&e))?;
            let nabla = frame
                .export_connection(&entry.connection, &Sampling::default())
                .map_err(|e| err(&e))?;
            let pair = SymPoissonPair::new(theta, nabla).map_err(|e| err(&e))?;
            Ok(Structure { pair, metric: None })
        }
    }
}

fn join_f64(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:?}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn index_key(name: &str, idx: &[usize]) -> String {
    let shown: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
    format!("{name}[{}]", shown.join(","))
}

impl fmt::Display for StructureFile {
    /// Canonical rendering; parsing it back gives an equal value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::from("[chart]\n");
        match &self.catalog {
            Some(cat) => writeln!(s, "catalog = {cat}")?,
            None => {
                writeln!(s, "names = {}", self.names.join(", "))?;
                if let Some(bx) = &self.sample_box {
                    let parts: Vec<String> =
                        bx.iter().map(|(a, b)| format!("{a:?} {b:?}")).collect();
                    writeln!(s, "box = {}", parts.join(", "))?;
                }
            }
        }
        if !self.theta.is_empty() {
            s.push_str("\n[theta]\n");
            for (k, v) in &self.theta {
                writeln!(s, "{} = \"{v}\"", index_key("theta", k))?;
            }
        }
        match &self.connection {
            ConnectionSpec::Flat => {}
            ConnectionSpec::Christoffel(g) => {
                s.push_str("\n[connection]\n");
                for (k, v) in g {
                    writeln!(s, "{} = \"{v}\"", index_key("gamma", k))?;
                }
            }
            ConnectionSpec::LeviCivita(m) => {
                s.push_str("\n[connection]\n");
                for (k, v) in m {
                    writeln!(s, "{} = \"{v}\"", index_key("metric", k))?;
                }
            }
        }
        let d = &self.dynamics;
        if *d != DynamicsSpec::default() {
            s.push_str("\n[dynamics]\n");
            if let Some(h) = &d.hamiltonian {
                writeln!(s, "hamiltonian = \"{h}\"")?;
            }
            if let Some(x0) = &d.x0 {
                writeln!(s, "x0 = {}", join_f64(x0))?;
            }
            if let Some(p0) = &d.p0 {
                writeln!(s, "p0 = {}", join_f64(p0))?;
            }
            if let Some(dt) = d.dt {
                writeln!(s, "dt = {dt:?}")?;
            }
            if let Some(steps) = d.steps {
                writeln!(s, "steps = {steps}")?;
            }
            if !d.monitors.is_empty() {
                writeln!(s, "monitors = {}", d.monitors.join(", "))?;
            }
        }
        let e = &self.expect;
        if !e.is_empty() {
            s.push_str("\n[expect]\n");
            if let Some(v) = e.symmetric_poisson {
                writeln!(s, "sp = {v}")?;
            }
            if let Some(v) = e.strong {
                writeln!(s, "strong = {v}")?;
            }
            if let Some(v) = e.parallel {
                writeln!(s, "parallel = {v}")?;
            }
            if let Some(v) = e.involutive {
                let word = match v {
                    Involutivity::InvolutiveOnSamples => "true",
                    Involutivity::NotInvolutive => "false",
                    Involutivity::Inconclusive => "inconclusive",
                };
                writeln!(s, "involutive = {word}")?;
            }
            if let Some(r) = &e.ranks {
                let parts: Vec<String> = r.iter().map(|v| v.to_string()).collect();
                writeln!(s, "ranks = {}", parts.join(", "))?;
            }
        }
        if !self.probes.is_empty() {
            s.push_str("\n[probe]\n");
            for p in &self.probes {
                writeln!(s, "point = {}", join_f64(p))?;
            }
        }
        let sm = &self.sampling;
        if *sm != SamplingSpec::default() {
            s.push_str("\n[sampling]\n");
            if let Some(v) = sm.seed {
                writeln!(s, "seed = {v}")?;
            }
            if let Some(v) = sm.count {
                writeln!(s, "count = {v}")?;
            }
            if let Some(v) = sm.tol {
                writeln!(s, "tol = {v:?}")?;
            }
        }
        f.write_str(&s)
    }
}
