//! Command implementations behind the `sympoisson` binary.
//!
//! Exit codes: 0 pass, 1 usage or parse error, 2 expectation mismatch,
//! 3 numeric failure.

pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use sympoisson::expr::EvalError;
use sympoisson::geometry::GeometryError;
use sympoisson::io::{parse_point_list, StructureFile, THETA_HAMILTONIAN};
use sympoisson::jj;
use sympoisson::liealg;
use sympoisson::poisson::{
    characteristic_data, involutivity_check, is_parallel, is_strong, is_symmetric_poisson,
    Involutivity,
};
use sympoisson::pw::{
    integrate_pw, monitor_geodesic_residual, monitor_momentum_on_velocity, monitor_speed_square,
    vertical_lift, CotangentState, PhaseField, PwError, Trajectory,
};
use sympoisson::sampling::{Sampling, Verdict, DEFAULT_COUNT, DEFAULT_SEED, DEFAULT_TOL};

use report::{Format, Report, Row};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_MISMATCH: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "sympoisson",
    version,
    about = "Verdicts and dynamics for symmetric Poisson structures"
)]
pub struct Cli {
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Overrides for the sampling parameters; a structure file's
/// `[sampling]` section sits between these and the defaults.
#[derive(Debug, Clone, Copy, Args)]
pub struct SamplingArgs {
    /// RNG seed for sample points (default 0x5EED).
    #[arg(long, global = true, value_parser = parse_seed)]
    pub seed: Option<u64>,
    /// Residual tolerance (default 1e-9).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Number of sample points (default 25).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the verdict suite on a structure file.
    Check {
        /// Structure file with an `[expect]` section.
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Integrate Patterson-Walker dynamics and write a trajectory CSV.
    Integrate(IntegrateArgs),
    /// Run the expected-verdict suite of shipped catalog entries.
    Catalog {
        /// Entry id, bare or prefixed (`jj:…`, `liealg:…`).
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        id: Option<String>,
        /// Every shipped entry.
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Combined report over structure files and, optionally, the catalog.
    Report {
        /// Structure files with `[expect]` sections.
        files: Vec<PathBuf>,
        /// Also include every catalog entry.
        #[arg(long)]
        catalog: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    /// Structure file; its `[dynamics]` section supplies defaults.
    pub file: PathBuf,
    /// `theta` for θᵛ, or an expression in the coordinates and p1..pn.
    #[arg(long)]
    pub hamiltonian: Option<String>,
    /// Initial base point, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    /// Initial momentum, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    pub p0: Option<String>,
    /// Time step (default 1e-3).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Number of RK4 steps (default 1000).
    #[arg(long)]
    pub steps: Option<usize>,
    /// Comma-separated channels among H, speed, momentum, geodesic.
    #[arg(long)]
    pub monitors: Option<String>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| e.to_string())
}

/// What a command produced: text for stdout, optional text for stderr,
/// and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn numeric(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_NUMERIC,
        message: message.into(),
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Failure {
        match e {
            GeometryError::Eval(_) | GeometryError::Degenerate { .. } => numeric(e.to_string()),
            _ => usage(e.to_string()),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Failure {
        numeric(e.to_string())
    }
}

impl SamplingArgs {
    fn resolve(&self, file: Option<&StructureFile>) -> Result<Sampling, Failure> {
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(usage("--tol must be a positive number"));
            }
        }
        let base = Sampling {
            count: DEFAULT_COUNT,
            seed: DEFAULT_SEED,
            tol: DEFAULT_TOL,
        };
        let base = match file {
            Some(f) => f.sampling.apply(base),
            None => base,
        };
        Ok(Sampling {
            count: self.samples.map_or(base.count, |c| c as usize),
            seed: self.seed.unwrap_or(base.seed),
            tol: self.tol.unwrap_or(base.tol),
        })
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Check { file, format } => {
            let f = load(file)?;
            let sampling = cli.sampling.resolve(Some(&f))?;
            let mut report = Report::new(sampling);
            check_rows(&subject(file), &f, &sampling, &mut report.rows)?;
            Ok(finish(report, *format))
        }
        Command::Integrate(args) => integrate(args, &cli.sampling),
        Command::Catalog { id, all, format } => {
            let sampling = cli.sampling.resolve(None)?;
            let ids = match (id, all) {
                (Some(id), false) => vec![resolve_catalog_id(id)?],
                _ => all_catalog_ids(),
            };
            let mut report = Report::new(sampling);
            for id in ids {
                catalog_rows(&id, &sampling, &mut report.rows)?;
            }
            Ok(finish(report, *format))
        }
        Command::Report {
            files,
            catalog,
            format,
        } => {
            if files.is_empty() && !catalog {
                return Err(usage("report needs structure files or --catalog"));
            }
            let sampling = cli.sampling.resolve(None)?;
            let mut report = Report::new(sampling);
            for file in files {
                let f = load(file)?;
                let s = cli.sampling.resolve(Some(&f))?;
                check_rows(&subject(file), &f, &s, &mut report.rows)?;
            }
            if *catalog {
                for id in all_catalog_ids() {
                    catalog_rows(&id, &sampling, &mut report.rows)?;
                }
            }
            Ok(finish(report, *format))
        }
    }
}

fn finish(report: Report, format: Format) -> Outcome {
    Outcome {
        stdout: report.render(format),
        stderr: String::new(),
        code: if report.all_pass() {
            EXIT_PASS
        } else {
            EXIT_MISMATCH
        },
    }
}

fn subject(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn load(path: &Path) -> Result<StructureFile, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    StructureFile::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn bool_word(b: bool) -> String {
    b.to_string()
}

fn involutivity_word(v: Involutivity) -> &'static str {
    match v {
        Involutivity::InvolutiveOnSamples => "true",
        Involutivity::NotInvolutive => "false",
        Involutivity::Inconclusive => "inconclusive",
    }
}

fn verdict_row(subject: &str, check: &str, v: &Verdict, expected: Option<bool>) -> Row {
    Row::new(subject, check, bool_word(v.holds))
        .expect(expected.map(bool_word))
        .residual(v.max_residual, v.samples)
}

/// The verdict suite of a structure file.
pub fn check_rows(
    subject: &str,
    file: &StructureFile,
    sampling: &Sampling,
    rows: &mut Vec<Row>,
) -> Result<(), Failure> {
    let built = file.build(sampling).map_err(|e| usage(e.to_string()))?;
    let pair = &built.pair;
    let e = &file.expect;
    let sp = is_symmetric_poisson(pair, sampling)?;
    rows.push(verdict_row(subject, "sp", &sp, e.symmetric_poisson));
    let strong = is_strong(pair, sampling)?;
    rows.push(verdict_row(subject, "strong", &strong, e.strong));
    let parallel = is_parallel(pair, sampling)?;
    rows.push(verdict_row(subject, "parallel", &parallel, e.parallel));
    let inv = involutivity_check(pair, sampling)?;
    rows.push(
        Row::new(subject, "involutive", involutivity_word(inv.verdict))
            .expect(e.involutive.map(|v| involutivity_word(v).to_string()))
            .residual(inv.max_residual, inv.samples),
    );
    for (k, x) in file.probes.iter().enumerate() {
        let data = characteristic_data(pair.theta(), x)?;
        let expected = e.ranks.as_ref().map(|r| r[k].to_string());
        rows.push(
            Row::new(subject, &format!("rank@{}", k + 1), data.rank.to_string()).expect(expected),
        );
        let (p, q) = data.signature;
        rows.push(Row::new(
            subject,
            &format!("signature@{}", k + 1),
            format!("({p},{q})"),
        ));
    }
    Ok(())
}

/// Every shipped catalog id, commutative algebras first.
pub fn all_catalog_ids() -> Vec<String> {
    jj::catalog_ids()
        .into_iter()
        .map(|id| format!("jj:{id}"))
        .chain(
            liealg::li_catalog()
                .into_iter()
                .map(|e| format!("liealg:{}", e.id)),
        )
        .collect()
}

/// Accepts `jj:<id>`, `liealg:<id>` or a bare id from either catalog.
pub fn resolve_catalog_id(id: &str) -> Result<String, Failure> {
    let unknown = || usage(format!("unknown catalog id `{id}`"));
    if let Some(rest) = id.strip_prefix("jj:") {
        jj::catalog_entry(rest).map_err(|_| unknown())?;
        return Ok(id.to_string());
    }
    if let Some(rest) = id.strip_prefix("liealg:") {
        liealg::li_catalog_entry(rest).map_err(|_| unknown())?;
        return Ok(id.to_string());
    }
    if jj::catalog_entry(id).is_ok() {
        return Ok(format!("jj:{id}"));
    }
    if liealg::li_catalog_entry(id).is_ok() {
        return Ok(format!("liealg:{id}"));
    }
    Err(unknown())
}

/// Closure of the generators `θ(dx^i)` under commutators, over the
/// constants: an exact sufficient condition for involutivity.
fn jj_generators_closed(alg: &jj::CommutativeAlgebra) -> bool {
    let n = alg.dim();
    (0..n).all(|a| {
        (a + 1..n).all(|b| {
            alg.in_generator_span(&alg.generator_bracket(a, b))
                .is_some()
        })
    })
}

fn catalog_rows(id: &str, sampling: &Sampling, rows: &mut Vec<Row>) -> Result<(), Failure> {
    let exact = |check: &str, got: bool, want: bool| {
        Row::new(id, check, bool_word(got)).expect(Some(bool_word(want)))
    };
    if let Some(rest) = id.strip_prefix("jj:") {
        let entry = jj::catalog_entry(rest).map_err(|e| usage(e.to_string()))?;
        let (alg, want) = (&entry.algebra, &entry.expected);
        rows.push(exact(
            "jacobi_jordan",
            alg.is_jacobi_jordan(),
            want.jacobi_jordan,
        ));
        rows.push(exact("associative", alg.is_associative(), want.associative));
        let pair = jj::to_linear_structure(alg);
        let sp = is_symmetric_poisson(&pair, sampling)?;
        rows.push(verdict_row(id, "sp", &sp, Some(want.symmetric_poisson)));
        let strong = is_strong(&pair, sampling)?;
        rows.push(verdict_row(id, "strong", &strong, Some(want.strong)));
        rows.push(exact(
            "involutive",
            jj_generators_closed(alg),
            want.involutive,
        ));
        let inv = involutivity_check(&pair, sampling)?;
        rows.push(
            Row::new(id, "involutive_sampled", involutivity_word(inv.verdict))
                .residual(inv.max_residual, inv.samples),
        );
    } else if let Some(rest) = id.strip_prefix("liealg:") {
        let entry = liealg::li_catalog_entry(rest).map_err(|e| usage(e.to_string()))?;
        let got = liealg::li_verdicts(&entry).map_err(|e| usage(e.to_string()))?;
        let want = entry.expected;
        rows.push(exact("sp", got.symmetric_poisson, want.symmetric_poisson));
        rows.push(exact("strong", got.strong, want.strong));
        rows.push(exact("parallel", got.parallel, want.parallel));
        rows.push(exact("involutive", got.involutive, want.involutive));
    } else {
        return Err(usage(format!("unknown catalog id `{id}`")));
    }
    Ok(())
}

const MONITORS: [&str; 4] = ["H", "speed", "momentum", "geodesic"];

fn integrate(args: &IntegrateArgs, flags: &SamplingArgs) -> Result<Outcome, Failure> {
    let file = load(&args.file)?;
    let sampling = flags.resolve(Some(&file))?;
    let built = file.build(&sampling).map_err(|e| usage(e.to_string()))?;
    let pair = &built.pair;
    let chart = pair.chart();
    let n = chart.dim();
    let d = &file.dynamics;

    let h_text = args
        .hamiltonian
        .clone()
        .or_else(|| d.hamiltonian.clone())
        .unwrap_or_else(|| THETA_HAMILTONIAN.to_string());
    let h = if h_text == THETA_HAMILTONIAN {
        vertical_lift(pair.theta())
    } else {
        PhaseField::parse(chart, &h_text)
            .map_err(|e| usage(format!("hamiltonian `{h_text}`: {e}")))?
    };
    let vector = |flag: &Option<String>, from_file: &Option<Vec<f64>>, name: &str| {
        let v = match flag {
            Some(text) => {
                parse_point_list(text).map_err(|e| usage(format!("--{name}: {}", e.message)))?
            }
            None => from_file.clone().ok_or_else(|| {
                usage(format!(
                    "missing {name}: pass --{name} or set it in [dynamics]"
                ))
            })?,
        };
        if v.len() != n {
            return Err(usage(format!(
                "{name} has {} entries, expected {n}",
                v.len()
            )));
        }
        Ok(v)
    };
    let x0 = vector(&args.x0, &d.x0, "x0")?;
    let p0 = vector(&args.p0, &d.p0, "p0")?;
    let dt = args.dt.or(d.dt).unwrap_or(1e-3);
    if !(dt.is_finite() && dt > 0.0) {
        return Err(usage("dt must be a positive number"));
    }
    let steps = args.steps.or(d.steps).unwrap_or(1000);
    if steps == 0 {
        return Err(usage("steps must be at least 1"));
    }
    let monitors: Vec<String> = match &args.monitors {
        Some(list) => list
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect(),
        None if !d.monitors.is_empty() => d.monitors.clone(),
        None => vec!["H".to_string(), "speed".to_string()],
    };
    if let Some(bad) = monitors.iter().find(|m| !MONITORS.contains(&m.as_str())) {
        return Err(usage(format!(
            "unknown monitor `{bad}`; choose from {}",
            MONITORS.join(", ")
        )));
    }

    let s0 = CotangentState::new(x0, p0).map_err(|e| usage(e.to_string()))?;
    let connection = pair.nabla().connection();
    let (mut traj, failure) = match integrate_pw(connection, &h, &s0, dt, steps) {
        Ok(t) => (t, None),
        Err(PwError::BlowUp { step, partial }) => (
            *partial,
            Some(format!("state became non-finite at step {step}")),
        ),
        Err(PwError::StepEval { step, source }) => {
            return Err(numeric(format!(
                "evaluation failed at step {step}: {source}"
            )));
        }
        Err(e) => return Err(usage(e.to_string())),
    };
    if failure.is_none() {
        add_monitors(&mut traj, pair, &h, &monitors)?;
    }
    let mut csv = Vec::new();
    traj.write_csv(&mut csv)
        .map_err(|e| numeric(e.to_string()))?;
    let csv = String::from_utf8(csv).expect("csv is utf-8");

    let mut summary = String::new();
    for ch in traj.channels() {
        if ch.name == "geodesic" {
            summary.push_str(&format!("max {} = {:.3e}\n", ch.name, ch.max()));
        } else {
            summary.push_str(&format!("drift {} = {:.3e}\n", ch.name, ch.drift()));
        }
    }
    let (stdout, mut stderr) = match &args.out {
        Some(path) => {
            fs::write(path, &csv)
                .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            (summary, String::new())
        }
        None => (csv, summary),
    };
    let code = match failure {
        Some(msg) => {
            stderr.push_str(&format!("blow-up: {msg}; partial trajectory written\n"));
            EXIT_NUMERIC
        }
        None => EXIT_PASS,
    };
    Ok(Outcome {
        stdout,
        stderr,
        code,
    })
}

fn add_monitors(
    traj: &mut Trajectory,
    pair: &sympoisson::poisson::SymPoissonPair,
    h: &PhaseField,
    monitors: &[String],
) -> Result<(), Failure> {
    let pw = |e: PwError| match e {
        PwError::TooFewSteps { .. } => usage(e.to_string()),
        other => numeric(other.to_string()),
    };
    for m in monitors {
        match m.as_str() {
            // Recorded by the integrator.
            "H" => {}
            "speed" => {
                let v = monitor_speed_square(pair, traj).map_err(pw)?;
                traj.add_channel("speed", v).map_err(pw)?;
            }
            "momentum" => {
                let v = monitor_momentum_on_velocity(h, traj).map_err(pw)?;
                traj.add_channel("momentum", v).map_err(pw)?;
            }
            "geodesic" => {
                let v = monitor_geodesic_residual(pair, traj).map_err(pw)?;
                traj.add_channel("geodesic", v.residual).map_err(pw)?;
            }
            _ => unreachable!("validated above"),
        }
    }
    Ok(())
}
