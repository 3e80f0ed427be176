//! Flags, JSON config file, and validation into a `RunConfig`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scattering::SolverConfig;
use crate::special_fn::{GAMMA_MAX, GAMMA_MIN};

pub const DEFAULT_OUT: &str = "hkcce-out";
pub const OUT_ENV: &str = "HKCCE_OUT";

/// Grid used by `sweep` for every list not given explicitly.
pub const SWEEP_N: [u32; 3] = [4, 5, 6];
pub const SWEEP_GAMMA: [f64; 5] = [0.25, 0.4, 0.5, 0.6, 0.75];
pub const SWEEP_K: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyTarget {
    HkAdapted,
    HkCla,
    HkLee,
    Defect,
    Prop21,
}

impl VerifyTarget {
    pub fn name(self) -> &'static str {
        match self {
            Self::HkAdapted => "hk-adapted",
            Self::HkCla => "hk-cla",
            Self::HkLee => "hk-lee",
            Self::Defect => "defect",
            Self::Prop21 => "prop21",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Subcommand)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Fractional Q-curvature from the scattering solver, checked against the oracle.
    Qcurv,
    /// Run one of the inequality, defect, or symbolic checks.
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
    },
    /// Pointwise identity residuals, positivity, and boundary values.
    Residuals,
    /// Heintze-Karcher ratio on shrinking level sets.
    Asymptotic,
    /// Q-curvature plus the adapted inequality over a parameter grid.
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Qcurv => "qcurv",
            Self::Verify { target } => target.name(),
            Self::Residuals => "residuals",
            Self::Asymptotic => "asymptotic",
            Self::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "hkcce",
    version,
    about = "Fractional Q-curvature and Heintze-Karcher checks on hyperbolic model spaces"
)]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,
    /// Dimensions: `4`, `4,5,6`, or an inclusive range `5..12`.
    #[arg(long, global = true)]
    pub n: Option<String>,
    /// Fractional orders, comma separated.
    #[arg(long, global = true)]
    pub gamma: Option<String>,
    /// Boundary curvatures, comma separated.
    #[arg(long, global = true)]
    pub k: Option<String>,
    /// Relative tolerance of the radial ODE solve (default 1e-8)
    #[arg(long = "ode-tol", global = true)]
    pub ode_tol: Option<f64>,
    /// Relative tolerance of the radial integrals (default 1e-6)
    #[arg(long = "quad-tol", global = true)]
    pub quad_tol: Option<f64>,
    /// Upper bound for the matching point.
    #[arg(long = "T", global = true)]
    pub t_max: Option<f64>,
    /// Output directory (overrides HKCCE_OUT and the config file).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON file with defaults for any of the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for independent cases (default: available cores)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Artifact formats to write, comma separated (default both)
    #[arg(long, global = true, value_delimiter = ',')]
    pub emit: Option<Vec<Emit>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ListSpec {
    One(f64),
    Many(Vec<f64>),
    Text(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n: Option<ListSpec>,
    gamma: Option<ListSpec>,
    k: Option<ListSpec>,
    ode_tol: Option<f64>,
    quad_tol: Option<f64>,
    #[serde(rename = "T")]
    t_max: Option<f64>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
    emit: Option<Vec<Emit>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub n: Vec<u32>,
    pub gamma: Vec<f64>,
    pub k: Vec<f64>,
    pub ode_tol: f64,
    pub quad_tol: f64,
    #[serde(rename = "T")]
    pub t_max: f64,
    pub out: PathBuf,
    pub jobs: usize,
    pub emit_csv: bool,
    pub emit_json: bool,
}

impl RunConfig {
    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            ode_tol: self.ode_tol,
            t_max: self.t_max,
            ..SolverConfig::default()
        }
    }
}

fn parse_float_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("--{what}: cannot parse '{s}' as a number")))
        })
        .collect()
}

fn parse_n_list(text: &str) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || Error::Config(format!("--n: cannot parse '{item}'"));
        if let Some((a, b)) = item.split_once("..") {
            let b = b.strip_prefix('=').unwrap_or(b);
            let (a, b): (u32, u32) = (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            );
            if a > b {
                return Err(Error::Config(format!("--n: empty range '{item}'")));
            }
            out.extend(a..=b);
        } else {
            out.push(item.parse().map_err(|_| bad())?);
        }
    }
    Ok(out)
}

fn spec_floats(spec: &ListSpec, what: &str) -> Result<Vec<f64>> {
    match spec {
        ListSpec::One(v) => Ok(vec![*v]),
        ListSpec::Many(v) => Ok(v.clone()),
        ListSpec::Text(t) => parse_float_list(t, what),
    }
}

fn spec_n(spec: &ListSpec) -> Result<Vec<u32>> {
    let as_int = |v: f64| {
        if v.fract() == 0.0 && (0.0..=f64::from(u32::MAX)).contains(&v) {
            Ok(v as u32)
        } else {
            Err(Error::Config(format!("n = {v} is not a dimension")))
        }
    };
    match spec {
        ListSpec::One(v) => Ok(vec![as_int(*v)?]),
        ListSpec::Many(v) => v.iter().map(|x| as_int(*x)).collect(),
        ListSpec::Text(t) => parse_n_list(t),
    }
}

fn read_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))
}

/// Sorted, deduplicated copy.
fn normalize_floats(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Merge flags over the config file over defaults. `env_out` is the value of
/// `HKCCE_OUT`, which sits between the `--out` flag and the file.
pub fn parse_config(args: Args, env_out: Option<PathBuf>) -> Result<RunConfig> {
    let file = match &args.config {
        Some(p) => read_file_config(p)?,
        None => FileConfig::default(),
    };
    let sweep = matches!(args.command, Command::Sweep);

    let n = match (&args.n, &file.n) {
        (Some(t), _) => parse_n_list(t)?,
        (None, Some(s)) => spec_n(s)?,
        (None, None) if sweep => SWEEP_N.to_vec(),
        (None, None) => vec![4],
    };
    let gamma = match (&args.gamma, &file.gamma) {
        (Some(t), _) => parse_float_list(t, "gamma")?,
        (None, Some(s)) => spec_floats(s, "gamma")?,
        (None, None) if sweep => SWEEP_GAMMA.to_vec(),
        (None, None) => vec![0.5],
    };
    let k = match (&args.k, &file.k) {
        (Some(t), _) => parse_float_list(t, "k")?,
        (None, Some(s)) => spec_floats(s, "k")?,
        (None, None) if sweep => SWEEP_K.to_vec(),
        (None, None) => vec![1.0],
    };
    let mut n = n;
    n.sort_unstable();
    n.dedup();
    let (gamma, k) = (normalize_floats(gamma), normalize_floats(k));

    let emit = args
        .emit
        .or(file.emit)
        .unwrap_or_else(|| vec![Emit::Csv, Emit::Json]);
    let cfg = RunConfig {
        command: args.command,
        n,
        gamma,
        k,
        ode_tol: args.ode_tol.or(file.ode_tol).unwrap_or(1e-8),
        quad_tol: args.quad_tol.or(file.quad_tol).unwrap_or(1e-6),
        t_max: args.t_max.or(file.t_max).unwrap_or(18.0),
        out: args
            .out
            .or(env_out)
            .or(file.out)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        jobs: args
            .jobs
            .or(file.jobs)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
        emit_csv: emit.contains(&Emit::Csv),
        emit_json: emit.contains(&Emit::Json),
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<()> {
    if cfg.n.is_empty() || cfg.gamma.is_empty() || cfg.k.is_empty() {
        return Err(Error::Config("parameter lists must be non-empty".into()));
    }
    let min_n = if cfg.command
        == (Command::Verify {
            target: VerifyTarget::Prop21,
        }) {
        5
    } else {
        3
    };
    if let Some(n) = cfg.n.iter().find(|n| **n < min_n || **n > 64) {
        return Err(Error::Config(format!(
            "n = {n} outside [{min_n}, 64] for {}",
            cfg.command.name()
        )));
    }
    if let Some(g) = cfg.gamma.iter().find(|g| !(GAMMA_MIN..=GAMMA_MAX).contains(*g)) {
        return Err(Error::Config(format!(
            "gamma = {g} outside [{GAMMA_MIN}, {GAMMA_MAX}] (resonance guard)"
        )));
    }
    if let Some(k) = cfg.k.iter().find(|k| !(**k > 0.0 && k.is_finite())) {
        return Err(Error::Config(format!("k = {k} must be positive")));
    }
    if !(1e-12..=1e-2).contains(&cfg.quad_tol) {
        return Err(Error::Config(format!(
            "quad_tol = {} outside [1e-12, 1e-2]",
            cfg.quad_tol
        )));
    }
    if cfg.jobs == 0 {
        return Err(Error::Config("--jobs must be at least 1".into()));
    }
    if !(cfg.emit_csv || cfg.emit_json) {
        return Err(Error::Config("--emit must name csv, json, or both".into()));
    }
    cfg.solver().validate()
}

/// Parse a full argument vector (including the program name).
pub fn parse_args<I, T>(argv: I, env_out: Option<PathBuf>) -> std::result::Result<RunConfig, ParseFailure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(ParseFailure::Clap)?;
    parse_config(args, env_out).map_err(ParseFailure::Config)
}

#[derive(Debug)]
pub enum ParseFailure {
    Clap(clap::Error),
    Config(Error),
}
