//! Command-line front end.
//!
//! Exit codes: 0 success, 2 argument error, 3 numerical failure,
//! 4 validation failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::ffunc::{FfuncError, SeriesConfig};
use crate::models::{DhoParams, ModelError, Parity, ParityChoice, RabiParams};
use crate::oracle::OracleModel;
use crate::spectrum::{
    flow, resolve_spectrum, scan, FlowResult, Root, RootConfig, ScanResult, SpectralModel,
    SpectrumConfig, SpectrumError, Sweep, DEFAULT_MAX_JUMP, MIN_POINTS,
};
use crate::validate::{run_suite, ValidationTarget};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "trirec",
    version,
    about = "Spectra of three-term-recurrence models from the zeros of F(x)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate F on a grid and write x, F, status, branch id.
    Scan(CommonArgs),
    /// Locate and classify the roots of F in the window.
    Roots(CommonArgs),
    /// Follow the levels while sweeping a parameter.
    Flow(FlowArgs),
    /// Run the oracle and consistency checks.
    Validate(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Dho,
    Rabi,
    RabiParity,
    Jc,
    RabiModified,
    GenRabi,
}

impl ModelArg {
    fn tag(self) -> &'static str {
        match self {
            ModelArg::Dho => "dho",
            ModelArg::Rabi => "rabi",
            ModelArg::RabiParity => "rabi-parity",
            ModelArg::Jc => "jc",
            ModelArg::RabiModified => "rabi-modified",
            ModelArg::GenRabi => "gen-rabi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct CommonArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Coupling lambda/omega.
    #[arg(long, allow_negative_numbers = true)]
    kappa: f64,
    /// Level splitting mu/omega.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    delta: f64,
    /// Bias of the generalized Rabi model, in units of omega.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// plus, minus or both (parity-resolved Rabi only).
    #[arg(long, default_value = "both")]
    parity: String,
    #[arg(long = "x-min", default_value_t = -1.0, allow_negative_numbers = true)]
    x_min: f64,
    #[arg(long = "x-max", default_value_t = 6.0, allow_negative_numbers = true)]
    x_max: f64,
    #[arg(long, default_value_t = 4000)]
    points: usize,
    #[arg(long = "rel-tol")]
    rel_tol: Option<f64>,
    #[arg(long = "x-tol")]
    x_tol: Option<f64>,
    #[arg(long = "max-terms")]
    max_terms: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct FlowArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// name:lo:hi:steps, e.g. delta:0:1:50 (steps counts sweep values).
    #[arg(long)]
    sweep: String,
}

#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<SpectrumError> for CliError {
    fn from(e: SpectrumError) -> Self {
        match e {
            SpectrumError::InvalidWindow(..)
            | SpectrumError::TooFewPoints(_)
            | SpectrumError::InvalidRootConfig(_)
            | SpectrumError::InvalidSweep(_)
            | SpectrumError::Model(_)
            | SpectrumError::Ffunc(FfuncError::InvalidConfig(_)) => CliError::usage(e.to_string()),
            other => CliError::numerical(other.to_string()),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn execute(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Scan(a) => cmd_scan(&a),
        Command::Roots(a) => cmd_roots(&a),
        Command::Flow(a) => cmd_flow(&a),
        Command::Validate(a) => cmd_validate(&a),
    }
}

fn spectrum_config(a: &CommonArgs) -> Result<SpectrumConfig, CliError> {
    if !(a.x_min < a.x_max) {
        return Err(CliError::usage(format!(
            "--x-min ({}) must be below --x-max ({})",
            a.x_min, a.x_max
        )));
    }
    if a.points < MIN_POINTS {
        return Err(CliError::usage(format!(
            "--points must be at least {MIN_POINTS}"
        )));
    }
    let mut series = SeriesConfig::default();
    if let Some(t) = a.rel_tol {
        series.rel_tol = t;
    }
    if let Some(m) = a.max_terms {
        series.max_terms = m;
    }
    series
        .validate()
        .map_err(|e| CliError::usage(e.to_string()))?;
    let mut roots = RootConfig::default();
    if let Some(t) = a.x_tol {
        roots.x_tol = t;
    }
    roots.validate()?;
    Ok(SpectrumConfig {
        x_lo: a.x_min,
        x_hi: a.x_max,
        points: a.points,
        series,
        roots,
    })
}

fn spectral_model(a: &CommonArgs) -> Result<SpectralModel, CliError> {
    let choice: ParityChoice = a.parity.parse()?;
    match a.model {
        ModelArg::Dho => Ok(SpectralModel::Dho(DhoParams::new(a.kappa, a.omega)?)),
        ModelArg::Rabi => Ok(SpectralModel::Rabi(RabiParams::new(a.kappa, a.delta, a.omega)?)),
        ModelArg::RabiParity => Ok(SpectralModel::ParityRabi {
            params: RabiParams::new(a.kappa, a.delta, a.omega)?,
            choice,
        }),
        ModelArg::Jc | ModelArg::RabiModified | ModelArg::GenRabi => Err(CliError::usage(format!(
            "model {} has no F-based solver; it supports only `validate`, which checks its truncated Hamiltonian",
            a.model.tag()
        ))),
    }
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::numerical(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::numerical(format!("cannot write output: {e}")))
        }
    }
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn parity_csv(p: Option<Parity>) -> &'static str {
    match p {
        Some(Parity::Plus) => "+1",
        Some(Parity::Minus) => "-1",
        None => "none",
    }
}

#[derive(Serialize)]
struct ParamsJson {
    kappa: f64,
    delta: f64,
    theta: f64,
    omega: f64,
    parity: String,
}

impl ParamsJson {
    fn from_args(a: &CommonArgs) -> Self {
        Self {
            kappa: a.kappa,
            delta: a.delta,
            theta: a.theta,
            omega: a.omega,
            parity: a.parity.clone(),
        }
    }
}

#[derive(Serialize)]
struct RootJson {
    x: f64,
    energy: f64,
    parity: Option<i8>,
    residual: f64,
    bracket: [f64; 2],
    classification: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

impl From<&Root> for RootJson {
    fn from(r: &Root) -> Self {
        Self {
            x: r.x,
            energy: r.energy,
            parity: r.parity.map(Parity::as_i8),
            residual: r.residual,
            bracket: [r.bracket.0, r.bracket.1],
            classification: r.classification.as_str(),
            note: r.note.clone(),
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| CliError::numerical(e.to_string()))
}

fn scan_csv(scans: &[(Option<Parity>, ScanResult)]) -> String {
    let with_parity = scans.len() > 1;
    let mut s = String::from(if with_parity {
        "x,F,status,branch_id,parity\n"
    } else {
        "x,F,status,branch_id\n"
    });
    for (parity, sr) in scans {
        for i in 0..sr.len() {
            let _ = write!(
                s,
                "{},{},{},{}",
                num(sr.xs[i]),
                num(sr.fs[i].value),
                sr.fs[i].status.as_str(),
                sr.branch_ids[i]
            );
            if with_parity {
                let _ = write!(s, ",{}", parity_csv(*parity));
            }
            s.push('\n');
        }
    }
    s
}

#[derive(Serialize)]
struct ScanPointJson {
    x: f64,
    #[serde(rename = "F")]
    f: Option<f64>,
    status: &'static str,
    branch_id: usize,
}

#[derive(Serialize)]
struct ScanJson {
    model: &'static str,
    params: ParamsJson,
    scans: Vec<ScanSectorJson>,
}

#[derive(Serialize)]
struct ScanSectorJson {
    parity: Option<i8>,
    points: Vec<ScanPointJson>,
}

fn cmd_scan(a: &CommonArgs) -> Result<i32, CliError> {
    let model = spectral_model(a)?;
    let cfg = spectrum_config(a)?;
    let mut scans = Vec::new();
    for (rec, parity) in model.recurrences() {
        scans.push((
            parity,
            scan(&rec, cfg.x_lo, cfg.x_hi, cfg.points, &cfg.series)?,
        ));
    }
    let text = match a.format {
        Format::Csv => scan_csv(&scans),
        Format::Json => to_json(&ScanJson {
            model: model.tag(),
            params: ParamsJson::from_args(a),
            scans: scans
                .iter()
                .map(|(p, sr)| ScanSectorJson {
                    parity: p.map(Parity::as_i8),
                    points: (0..sr.len())
                        .map(|i| ScanPointJson {
                            x: sr.xs[i],
                            f: sr.fs[i].value.is_finite().then_some(sr.fs[i].value),
                            status: sr.fs[i].status.as_str(),
                            branch_id: sr.branch_ids[i],
                        })
                        .collect(),
                })
                .collect(),
        })?,
    };
    write_output(&a.out, &text)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct RootsJson {
    model: &'static str,
    params: ParamsJson,
    roots: Vec<RootJson>,
}

fn roots_csv(roots: &[Root]) -> String {
    let mut s = String::from("x,energy,parity,residual,bracket_lo,bracket_hi,classification\n");
    for r in roots {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            num(r.x),
            num(r.energy),
            parity_csv(r.parity),
            num(r.residual),
            num(r.bracket.0),
            num(r.bracket.1),
            r.classification.as_str()
        );
    }
    s
}

fn cmd_roots(a: &CommonArgs) -> Result<i32, CliError> {
    let model = spectral_model(a)?;
    let cfg = spectrum_config(a)?;
    let roots = resolve_spectrum(&model, &cfg)?;
    let text = match a.format {
        Format::Csv => roots_csv(&roots),
        Format::Json => to_json(&RootsJson {
            model: model.tag(),
            params: ParamsJson::from_args(a),
            roots: roots.iter().map(RootJson::from).collect(),
        })?,
    };
    write_output(&a.out, &text)?;
    Ok(EXIT_OK)
}

/// `(sweep value, track id, root)` rows, ordered by sweep value then track.
fn flow_rows(f: &FlowResult) -> Vec<(f64, usize, &Root)> {
    let ids = f.track_ids();
    let mut rows = Vec::new();
    for (s, levels) in f.levels.iter().enumerate() {
        let mut step: Vec<(f64, usize, &Root)> = levels
            .iter()
            .enumerate()
            .map(|(j, r)| (f.sweep_values[s], ids[s][j], r))
            .collect();
        step.sort_by_key(|&(_, id, _)| id);
        rows.extend(step);
    }
    rows
}

#[derive(Serialize)]
struct FlowRowJson {
    sweep_value: f64,
    track_id: usize,
    x_root: f64,
    energy: f64,
    parity: Option<i8>,
    residual: f64,
}

#[derive(Serialize)]
struct FlowJson {
    model: &'static str,
    params: ParamsJson,
    sweep: String,
    rows: Vec<FlowRowJson>,
}

fn cmd_flow(a: &FlowArgs) -> Result<i32, CliError> {
    let model = spectral_model(&a.common)?;
    let cfg = spectrum_config(&a.common)?;
    let sweep: Sweep = a.sweep.parse()?;
    let result = flow(&model, &sweep, &cfg, DEFAULT_MAX_JUMP)?;
    let rows = flow_rows(&result);
    let text = match a.common.format {
        Format::Csv => {
            let mut s = String::from("sweep_value,track_id,x_root,energy,parity,residual\n");
            for (v, id, r) in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    num(*v),
                    id,
                    num(r.x),
                    num(r.energy),
                    parity_csv(r.parity),
                    num(r.residual)
                );
            }
            s
        }
        Format::Json => to_json(&FlowJson {
            model: model.tag(),
            params: ParamsJson::from_args(&a.common),
            sweep: a.sweep.clone(),
            rows: rows
                .iter()
                .map(|(v, id, r)| FlowRowJson {
                    sweep_value: *v,
                    track_id: *id,
                    x_root: r.x,
                    energy: r.energy,
                    parity: r.parity.map(Parity::as_i8),
                    residual: r.residual,
                })
                .collect(),
        })?,
    };
    write_output(&a.common.out, &text)?;
    Ok(EXIT_OK)
}

fn cmd_validate(a: &CommonArgs) -> Result<i32, CliError> {
    let cfg = spectrum_config(a)?;
    let target = match a.model {
        ModelArg::Dho | ModelArg::Rabi | ModelArg::RabiParity => {
            ValidationTarget::Spectral(spectral_model(a)?)
        }
        _ => ValidationTarget::Oracle(
            OracleModel::from_tag(a.model.tag(), a.kappa, a.delta, a.omega, a.theta)
                .map_err(|e| CliError::usage(e.to_string()))?,
        ),
    };
    let outcomes = run_suite(&target, &cfg);
    let mut text = String::new();
    for o in &outcomes {
        text.push_str(&o.line());
        text.push('\n');
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let _ = writeln!(text, "{} checks, {} failed", outcomes.len(), failed);
    write_output(&a.out, &text)?;
    Ok(if failed == 0 {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    })
}
