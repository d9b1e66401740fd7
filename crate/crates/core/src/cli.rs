//! Command-line front end.
//!
//! Every JSON report carries a `manifest` object describing the run. Exit
//! codes: 0 success, 2 input or I/O error, 3 strong-monogamy violation
//! candidate.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::monogamy::{
    ckw_report, sm_residual, verify_saturation, CkwReport, MonogamyConfig, MonogamyReport, RoofDiagnostics,
    Tolerances, DEFAULT_MAX_QUBITS,
};
use crate::qstate::{partial_trace, DensityOperator, QubitSubset, StateVector};
use crate::random::haar_state_seeded;
use crate::roof::{m_tangle_mixed, RoofConfig};
use crate::tangle::{hierarchy, n_tangle_pure, one_tangle, two_tangle, IndexOrdering, NTangle};
use crate::wclass::{wclass_one_tangle, wclass_random, wclass_state, wclass_two_tangle, WClassParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SM_VIOLATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "monotangle", version, about = "Tangle hierarchy and strong-monogamy checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Seed for roof restarts and for sampled states.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random starts per roof search, besides the spectral one.
    #[arg(long, global = true, default_value_t = 32)]
    pub restarts: usize,
    /// Decomposition size beyond the rank.
    #[arg(long, global = true, default_value_t = 2)]
    pub padding: usize,
    /// Sweep budget of each local roof search.
    #[arg(long, global = true, default_value_t = 500)]
    pub max_sweeps: usize,
    /// Tolerance for verdicts involving roof terms.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol_roof: f64,
    /// Tolerance for verdicts involving only closed forms.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_closed: f64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output path; stdout when omitted (required by `batch`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Counting of partner subsets in the n-tangle.
    #[arg(long, global = true, value_enum, default_value_t)]
    pub ordering: IndexOrdering,
    /// Largest register for strong-monogamy evaluation.
    #[arg(long, global = true, env = "MONOTANGLE_MAX_QUBITS", default_value_t = DEFAULT_MAX_QUBITS)]
    pub max_qubits: usize,
    /// Record wall-clock times (makes output run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generalized W-class state and print its closed-form tangles.
    WclassGen(WClassSource),
    /// Evaluate tangles of a state or density file.
    Tangle(TangleArgs),
    /// One-tangle versus the sum of two-tangles.
    CkwCheck(CheckArgs),
    /// Full strong-monogamy residual with roof terms.
    SmCheck(SmCheckArgs),
    /// Residuals for many sampled states, as CSV.
    Batch(BatchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct WClassSource {
    /// Number of qubits.
    #[arg(long)]
    pub n: Option<usize>,
    /// Use the symmetric W state (a = 0, b_k = 1/sqrt(n)).
    #[arg(long, conflicts_with = "coeffs")]
    pub w: bool,
    /// Coefficients file `{"a": [re, im], "b": [[re, im], ...]}`.
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TangleArgs {
    /// State (`amplitudes`) or density (`matrix`) JSON file.
    pub file: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub focus: usize,
    /// Partner labels, comma separated.
    #[arg(long, value_delimiter = ',', required_unless_present = "all", conflicts_with = "all")]
    pub partners: Vec<usize>,
    /// Every partner subset, plus the one-tangle for pure states.
    #[arg(long)]
    pub all: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 1, conflicts_with = "sweep_foci")]
    pub focus: usize,
    /// Report every qubit as hub.
    #[arg(long)]
    pub sweep_foci: bool,
}

#[derive(Debug, Args)]
pub struct SmCheckArgs {
    /// State file; omit with `--wclass`.
    #[arg(required_unless_present = "wclass", conflicts_with = "wclass")]
    pub file: Option<PathBuf>,
    /// Generate a W-class state instead of reading one.
    #[arg(long)]
    pub wclass: bool,
    #[command(flatten)]
    pub source: WClassSource,
    #[arg(long, default_value_t = 1, conflicts_with = "sweep_foci")]
    pub focus: usize,
    /// Report every qubit as hub.
    #[arg(long)]
    pub sweep_foci: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Wclass,
    Haar,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    #[arg(long, value_enum, default_value_t = Family::Wclass)]
    pub family: Family,
    /// Qubit count or inclusive range such as `3..5`.
    #[arg(long, value_parser = parse_range)]
    pub n: RangeInclusive<usize>,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub focus: usize,
}

fn parse_range(s: &str) -> std::result::Result<RangeInclusive<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad qubit count {t:?}: {e}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => (num(s)?, num(s)?),
    };
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok(lo..=hi)
}

/// Provenance attached to every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub seed: u64,
    pub roof: RoofConfig,
    pub tolerances: Tolerances,
    pub ordering: IndexOrdering,
    pub inputs: Vec<String>,
    pub output: Option<String>,
    pub version: String,
    /// Only recorded with `--timing`.
    pub wall_clock_ms: Option<f64>,
}

/// A report with its manifest alongside the report's own fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub manifest: RunManifest,
    #[serde(flatten)]
    pub report: T,
}

/// Reports for several hubs of one state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sweep<T> {
    pub reports: Vec<T>,
}

/// How a tangle entry was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Determinant or concurrence formula.
    Closed,
    /// Recursive definition on a pure state.
    Pure,
    /// Convex roof over decompositions.
    Roof,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangleEntry {
    pub level: usize,
    pub partners: Vec<usize>,
    pub value: f64,
    pub method: Method,
    pub converged: bool,
    pub roof: Option<RoofDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangleReport {
    pub focus: usize,
    pub labels: Vec<usize>,
    pub pure: bool,
    pub entries: Vec<TangleEntry>,
    pub converged: bool,
}

/// Runs the command line `args` (program name first) and returns the exit
/// code. Panics are reported as input errors so the exit contract holds.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let arguments = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match catch_unwind(AssertUnwindSafe(|| run(cli, arguments))) {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
        Err(_) => {
            eprintln!("error: internal failure");
            EXIT_INPUT
        }
    }
}

/// Executes a parsed command line; `arguments` are recorded in manifests.
pub fn run(cli: Cli, arguments: Vec<String>) -> Result<i32> {
    let jobs = cli.global.jobs;
    let ctx = Context::new(cli.global, subcommand_name(&cli.command), arguments)?;
    match jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::Input(format!("cannot start {jobs} workers: {e}")))?;
            pool.install(|| dispatch(&ctx, cli.command))
        }
        None => dispatch(&ctx, cli.command),
    }
}

fn subcommand_name(command: &Command) -> &'static str {
    match command {
        Command::WclassGen(_) => "wclass-gen",
        Command::Tangle(_) => "tangle",
        Command::CkwCheck(_) => "ckw-check",
        Command::SmCheck(_) => "sm-check",
        Command::Batch(_) => "batch",
    }
}

fn dispatch(ctx: &Context, command: Command) -> Result<i32> {
    match command {
        Command::WclassGen(a) => cmd_wclass_gen(ctx, &a),
        Command::Tangle(a) => cmd_tangle(ctx, &a),
        Command::CkwCheck(a) => cmd_ckw_check(ctx, &a),
        Command::SmCheck(a) => cmd_sm_check(ctx, &a),
        Command::Batch(a) => cmd_batch(ctx, &a),
    }
}

struct Context {
    global: GlobalArgs,
    command: &'static str,
    arguments: Vec<String>,
    config: MonogamyConfig,
    started: Instant,
}

impl Context {
    fn new(global: GlobalArgs, command: &'static str, arguments: Vec<String>) -> Result<Self> {
        if global.jobs == Some(0) {
            return input("--jobs must be at least 1");
        }
        for (name, tol) in [("--tol-roof", global.tol_roof), ("--tol-closed", global.tol_closed)] {
            if !(tol.is_finite() && tol >= 0.0) {
                return input(format!("{name} must be a nonnegative number, got {tol}"));
            }
        }
        let roof = RoofConfig {
            seed: global.seed,
            restarts: global.restarts,
            padding: global.padding,
            max_sweeps: global.max_sweeps,
            ..RoofConfig::default()
        };
        roof.validate()?;
        let config = MonogamyConfig {
            tangle: NTangle {
                roof,
                ordering: global.ordering,
            },
            tolerances: Tolerances {
                closed: global.tol_closed,
                roof: global.tol_roof,
            },
            max_qubits: global.max_qubits,
        };
        Ok(Self {
            global,
            command,
            arguments,
            config,
            started: Instant::now(),
        })
    }

    fn manifest(&self, inputs: &[&Path]) -> RunManifest {
        RunManifest {
            command: self.command.to_string(),
            arguments: self.arguments.clone(),
            seed: self.global.seed,
            roof: self.config.tangle.roof.clone(),
            tolerances: self.config.tolerances,
            ordering: self.global.ordering,
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            output: self.global.out.as_ref().map(|p| p.display().to_string()),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_ms: self.global.timing.then(|| self.started.elapsed().as_secs_f64() * 1e3),
        }
    }

    /// Writes `report` with its manifest to `--out` or stdout.
    fn emit<T: Serialize>(&self, report: T, inputs: &[&Path]) -> Result<()> {
        let env = Envelope {
            manifest: self.manifest(inputs),
            report,
        };
        self.write_primary(&(serde_json::to_string_pretty(&env)? + "\n"))
    }

    fn write_primary(&self, text: &str) -> Result<()> {
        match &self.global.out {
            Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }

    /// Human-readable lines go to stdout unless stdout carries the report.
    fn say(&self, line: &str) {
        if self.global.out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
}

/// Attributes a parse or validation failure to the file it came from.
fn in_file(path: &Path, e: Error) -> Error {
    let msg = match e {
        Error::Json(j) => j.to_string(),
        other => other.to_string(),
    };
    Error::Input(format!("{}: {msg}", path.display()))
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Input(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

/// Residuals and tangles in human summaries: three significant digits.
fn sci(x: f64) -> String {
    format!("{x:.2e}")
}

fn load_params(source: &WClassSource, seed: u64) -> Result<WClassParams> {
    let params = match (&source.coeffs, source.w, source.n) {
        (Some(path), _, n) => {
            let p = WClassParams::from_json(&read(path)?).map_err(|e| in_file(path, e))?;
            if let Some(n) = n {
                if n != p.num_qubits() {
                    return input(format!("--n {n} disagrees with {} qubits in coefficients", p.num_qubits()));
                }
            }
            p
        }
        (None, true, Some(n)) => WClassParams::w_state(n)?,
        (None, false, Some(n)) => wclass_random(n, seed)?,
        (None, _, None) => return input("give --n (with --w or --seed) or --coeffs"),
    };
    Ok(params)
}

fn cmd_wclass_gen(ctx: &Context, source: &WClassSource) -> Result<i32> {
    let params = load_params(source, ctx.global.seed)?;
    let state = wclass_state(&params);
    ctx.write_primary(&(state.to_json()? + "\n"))?;
    if let Some(out) = &ctx.global.out {
        let inputs: Vec<&Path> = source.coeffs.iter().map(PathBuf::as_path).collect();
        let manifest = serde_json::to_string_pretty(&ctx.manifest(&inputs))? + "\n";
        let path = sidecar(out);
        fs::write(&path, manifest).map_err(|e| io_error(&path, e))?;
    }
    ctx.say(&format!("one-tangle tau(1|rest) = {}", sci(wclass_one_tangle(&params).value)));
    for j in 2..=params.num_qubits() {
        ctx.say(&format!("two-tangle tau(1|{j}) = {}", sci(wclass_two_tangle(&params, j)?.value)));
    }
    Ok(EXIT_OK)
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

enum Register {
    Pure(StateVector),
    Mixed(DensityOperator),
}

impl Register {
    fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        let parsed = if value.get("matrix").is_some() {
            serde_json::from_value(value).map(Register::Mixed)
        } else {
            serde_json::from_value(value).map(Register::Pure)
        };
        parsed.map_err(|e| Error::Input(format!("{}: {e}", path.display())))
    }

    fn labels(&self) -> Vec<usize> {
        match self {
            Register::Pure(s) => (1..=s.num_qubits()).collect(),
            Register::Mixed(r) => r.labels().to_vec(),
        }
    }

    fn reduce(&self, keep: &QubitSubset) -> Result<DensityOperator> {
        match self {
            Register::Pure(s) => s.reduce(keep),
            Register::Mixed(r) => partial_trace(r, keep),
        }
    }
}

fn load_state(path: &Path) -> Result<StateVector> {
    StateVector::from_json(&read(path)?).map_err(|e| in_file(path, e))
}

fn cmd_tangle(ctx: &Context, args: &TangleArgs) -> Result<i32> {
    let register = Register::load(&args.file)?;
    let labels = register.labels();
    let focus = args.focus;
    if !labels.contains(&focus) {
        return input(format!("focus {focus} is not one of the qubits {labels:?}"));
    }
    let others: Vec<usize> = labels.iter().copied().filter(|&l| l != focus).collect();
    let entries = match (&register, args.all) {
        (Register::Pure(state), true) => pure_hierarchy(ctx, state, focus)?,
        (_, true) => {
            let mut entries = Vec::new();
            for k in 1..=others.len() {
                for subset in crate::tangle::combinations(&others, k) {
                    entries.push(subset_tangle(ctx, &register, focus, &subset)?);
                }
            }
            entries
        }
        (_, false) => {
            let subset = QubitSubset::new(args.partners.iter().copied())?;
            if subset.contains(focus) || !subset.is_subset_of(&others) {
                return input(format!(
                    "partners {:?} must be distinct qubits of {labels:?} other than the focus",
                    args.partners
                ));
            }
            vec![subset_tangle(ctx, &register, focus, subset.labels())?]
        }
    };
    let report = TangleReport {
        focus,
        labels,
        pure: matches!(register, Register::Pure(_)),
        converged: entries.iter().all(|e| e.converged),
        entries,
    };
    for e in &report.entries {
        let flag = if e.converged { "" } else { " (not converged)" };
        ctx.say(&format!("tau_{}({focus}|{:?}) = {}{flag}", e.level, e.partners, sci(e.value)));
    }
    ctx.emit(report, &[&args.file])?;
    Ok(EXIT_OK)
}

fn check_register_size(ctx: &Context, size: usize) -> Result<()> {
    if size >= 3 && size > ctx.config.max_qubits {
        return input(format!(
            "{size}-qubit roof exceeds the cap of {} (MONOTANGLE_MAX_QUBITS)",
            ctx.config.max_qubits
        ));
    }
    Ok(())
}

/// One-tangle, every mixed term and the n-tangle of a pure state.
fn pure_hierarchy(ctx: &Context, state: &StateVector, focus: usize) -> Result<Vec<TangleEntry>> {
    let n = state.num_qubits();
    check_register_size(ctx, n)?;
    let mut entries = vec![TangleEntry {
        level: 1,
        partners: Vec::new(),
        value: one_tangle(state, focus)?.value,
        method: Method::Closed,
        converged: true,
        roof: None,
    }];
    let h = hierarchy(state.amplitudes(), n, focus - 1, &ctx.config.tangle, true);
    for t in &h.terms {
        let partners = t.partners.iter().map(|p| p + 1).collect();
        entries.push(TangleEntry {
            level: t.level,
            partners,
            value: t.value,
            method: if t.roof.is_some() { Method::Roof } else { Method::Closed },
            converged: t.roof.as_ref().is_none_or(|r| r.converged),
            roof: t.roof.as_ref().map(RoofDiagnostics::from),
        });
    }
    if n >= 2 {
        entries.push(TangleEntry {
            level: n,
            partners: (1..=n).filter(|&l| l != focus).collect(),
            value: h.residual(),
            method: if n == 2 { Method::Closed } else { Method::Pure },
            converged: h.converged(),
            roof: None,
        });
    }
    Ok(entries)
}

/// Tangle of the focus with `partners`: closed form for one partner, the
/// recursive definition when they complete a pure state, a roof otherwise.
fn subset_tangle(ctx: &Context, register: &Register, focus: usize, partners: &[usize]) -> Result<TangleEntry> {
    let level = partners.len() + 1;
    let partner_set = QubitSubset::new(partners.iter().copied())?;
    let keep = QubitSubset::new(partners.iter().copied().chain([focus]))?;
    if level == 2 {
        let rho = register.reduce(&keep)?;
        return Ok(TangleEntry {
            level,
            partners: partners.to_vec(),
            value: two_tangle(&rho)?.value,
            method: Method::Closed,
            converged: true,
            roof: None,
        });
    }
    check_register_size(ctx, level)?;
    if let Register::Pure(state) = register {
        if level == state.num_qubits() {
            let outcome = n_tangle_pure(state, focus, &partner_set, &ctx.config.tangle)?;
            return Ok(TangleEntry {
                level,
                partners: partners.to_vec(),
                value: outcome.tangle.value,
                method: Method::Pure,
                converged: outcome.converged,
                roof: None,
            });
        }
    }
    let rho = register.reduce(&keep)?;
    let r = m_tangle_mixed(&rho, focus, &partner_set, &ctx.config.tangle, &ctx.config.tangle.roof)?;
    Ok(TangleEntry {
        level,
        partners: partners.to_vec(),
        value: r.value,
        method: Method::Roof,
        converged: r.converged,
        roof: Some(RoofDiagnostics::from(&r)),
    })
}

fn foci(n: usize, focus: usize, sweep: bool) -> Vec<usize> {
    if sweep {
        (1..=n).collect()
    } else {
        vec![focus]
    }
}

fn cmd_ckw_check(ctx: &Context, args: &CheckArgs) -> Result<i32> {
    let state = load_state(&args.file)?;
    let mut reports: Vec<CkwReport> = Vec::new();
    for focus in foci(state.num_qubits(), args.focus, args.sweep_foci) {
        let r = ckw_report(&state, focus, ctx.config.tolerances)?;
        ctx.say(&format!(
            "focus {focus}: ckw_residual {} saturated {}",
            sci(r.ckw_residual),
            r.saturated_ckw
        ));
        reports.push(r);
    }
    if args.sweep_foci {
        ctx.emit(Sweep { reports }, &[&args.file])?;
    } else {
        ctx.emit(reports.remove(0), &[&args.file])?;
    }
    Ok(EXIT_OK)
}

fn cmd_sm_check(ctx: &Context, args: &SmCheckArgs) -> Result<i32> {
    let (state, params, inputs): (StateVector, Option<WClassParams>, Vec<&Path>) = match &args.file {
        Some(path) => (load_state(path)?, None, vec![path.as_path()]),
        None => {
            let p = load_params(&args.source, ctx.global.seed)?;
            let inputs = args.source.coeffs.iter().map(PathBuf::as_path).collect();
            (wclass_state(&p), Some(p), inputs)
        }
    };
    let mut reports: Vec<MonogamyReport> = Vec::new();
    for focus in foci(state.num_qubits(), args.focus, args.sweep_foci) {
        let report = match (&params, focus) {
            (Some(p), 1) => verify_saturation(p, &ctx.config)?,
            _ => sm_residual(&state, focus, &ctx.config)?,
        };
        ctx.say(&format!(
            "focus {focus}: sm_residual {} ckw_residual {} max_roof_term {} saturated_sm {}{}",
            sci(report.sm_residual),
            sci(report.ckw_residual),
            sci(report.max_roof_term()),
            report.saturated_sm,
            if report.converged { "" } else { " (not converged)" }
        ));
        if report.sm_violation_candidate {
            eprintln!(
                "warning: focus {focus} has sm_residual {:e} below -{:e}: strong-monogamy violation candidate",
                report.sm_residual,
                report.sm_tolerance()
            );
        }
        reports.push(report);
    }
    let violation = reports.iter().any(|r| r.sm_violation_candidate);
    if args.sweep_foci {
        ctx.emit(Sweep { reports }, &inputs)?;
    } else {
        ctx.emit(reports.remove(0), &inputs)?;
    }
    Ok(if violation { EXIT_SM_VIOLATION } else { EXIT_OK })
}

/// One CSV row of `batch`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRow {
    pub n: usize,
    pub sample: usize,
    pub seed: u64,
    pub ckw_residual: f64,
    pub sm_residual: f64,
    pub max_m3plus_term: f64,
    pub runtime_ms: f64,
}

fn cmd_batch(ctx: &Context, args: &BatchArgs) -> Result<i32> {
    let Some(out) = &ctx.global.out else {
        return input("batch needs --out for the CSV file");
    };
    if args.samples == 0 {
        return input("--samples must be at least 1");
    }
    let jobs: Vec<(usize, usize)> = args
        .n
        .clone()
        .flat_map(|n| (0..args.samples).map(move |s| (n, s)))
        .collect();
    // Sample k of every size uses state seed `seed + k`.
    let evaluated: Vec<Result<(BatchRow, bool)>> = jobs
        .par_iter()
        .map(|&(n, sample)| {
            let t0 = Instant::now();
            let seed = ctx.global.seed.wrapping_add(sample as u64);
            let state = match args.family {
                Family::Wclass => wclass_state(&wclass_random(n, seed)?),
                Family::Haar => haar_state_seeded(n, seed)?,
            };
            let report = sm_residual(&state, args.focus, &ctx.config)?;
            let runtime_ms = if ctx.global.timing { t0.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
            let row = BatchRow {
                n,
                sample,
                seed,
                ckw_residual: report.ckw_residual,
                sm_residual: report.sm_residual,
                max_m3plus_term: report.max_roof_term(),
                runtime_ms,
            };
            Ok((row, report.sm_violation_candidate))
        })
        .collect();
    let mut writer = csv::Writer::from_path(out).map_err(|e| Error::Input(format!("{}: {e}", out.display())))?;
    let mut violations = 0;
    for result in evaluated {
        let (row, violation) = result?;
        violations += usize::from(violation);
        writer.serialize(&row)?;
    }
    writer.flush()?;
    let manifest = serde_json::to_string_pretty(&ctx.manifest(&[]))? + "\n";
    let path = sidecar(out);
    fs::write(&path, manifest).map_err(|e| io_error(&path, e))?;
    println!("{} rows written to {}", jobs.len(), out.display());
    if violations > 0 {
        eprintln!("warning: {violations} strong-monogamy violation candidates");
        return Ok(EXIT_SM_VIOLATION);
    }
    Ok(EXIT_OK)
}
