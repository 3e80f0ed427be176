//! The `hkcce` command line: parse, run cases on a bounded pool, write
//! `manifest.json`, `reports/*.json` and `tables/*.csv`.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

pub use config::{parse_args, parse_config, Args, Command, ParseFailure, RunConfig, VerifyTarget};
use output::{num, opt_num, Artifacts, Table};

use crate::compactification::{build_adapted, build_lee, CompactifiedGeometry, Kind};
use crate::error::{Error, Result};
use crate::hk_verifier::{
    asymptotic_ratio, defect_identity, log_grid, verify_adapted, verify_cla, verify_lee, VerificationReport,
    VerifyConfig,
};
use crate::jet_algebra::verify_prop21;
use crate::model_geometry::ModelSpace;
use crate::quadrature::QuadConfig;
use crate::scattering::{q_curvature, scatter};
use crate::special_fn::QCurvParams;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Residual bound for adapted builds; Lee builds are closed form.
pub const RESIDUAL_TOL_ADAPTED: f64 = 1e-5;
pub const RESIDUAL_TOL_LEE: f64 = 1e-8;
pub const BOUNDARY_TOL: f64 = 1e-4;
/// Samples across the interior window for residuals and profile dumps.
pub const RESIDUAL_SAMPLES: usize = 400;

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub passed: bool,
    /// Report (or table) paths of failing cases.
    pub failing: Vec<PathBuf>,
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Json(_) => EXIT_IO,
        Error::Config(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

/// Entry point shared by the binary and the tests.
pub fn main_with_args<I, T>(argv: I, env_out: Option<PathBuf>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match parse_args(argv, env_out) {
        Ok(c) => c,
        Err(ParseFailure::Clap(e)) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
        Err(ParseFailure::Config(e)) => {
            eprintln!("hkcce: {e}");
            return EXIT_USAGE;
        }
    };
    match run_command(&cfg) {
        Ok(out) => {
            for l in &out.lines {
                println!("{l}");
            }
            if out.passed {
                EXIT_OK
            } else {
                for p in &out.failing {
                    eprintln!("hkcce: failing report {}", p.display());
                }
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("hkcce: {e}");
            exit_code(&e)
        }
    }
}

/// One `(n, gamma, k)` case key; lists in `RunConfig` are sorted, so the
/// product order is the deterministic report order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Case {
    pub n: u32,
    pub gamma: Option<f64>,
    pub k: f64,
}

impl Case {
    fn tag(&self) -> String {
        match self.gamma {
            Some(g) => format!("n{}-g{g}-k{}", self.n, self.k),
            None => format!("n{}-k{}", self.n, self.k),
        }
    }
}

fn grid(cfg: &RunConfig, with_gamma: bool) -> Vec<Case> {
    let mut out = Vec::new();
    for &n in &cfg.n {
        let gammas: Vec<Option<f64>> = if with_gamma {
            cfg.gamma.iter().map(|g| Some(*g)).collect()
        } else {
            vec![None]
        };
        for gamma in gammas {
            for &k in &cfg.k {
                out.push(Case { n, gamma, k });
            }
        }
    }
    out
}

fn verify_config(cfg: &RunConfig) -> VerifyConfig {
    VerifyConfig {
        solver: cfg.solver(),
        quad: QuadConfig::default(),
        tol: cfg.quad_tol,
    }
}

/// Relative bound on `|Q - oracle|/oracle` for a given ODE tolerance.
pub fn q_tolerance(ode_tol: f64) -> f64 {
    (100.0 * ode_tol).max(1e-6)
}

pub fn run_command(cfg: &RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    let mut art = Artifacts::new(cfg.out.clone());
    let mut out = pool.install(|| match cfg.command {
        Command::Qcurv => run_qcurv(cfg, &mut art),
        Command::Verify { target } => match target {
            VerifyTarget::Prop21 => run_prop21(cfg, &mut art),
            VerifyTarget::Defect => run_defect(cfg, &mut art),
            t => run_verify(cfg, t, &mut art),
        },
        Command::Residuals => run_residuals(cfg, &mut art),
        Command::Asymptotic => run_asymptotic(cfg, &mut art),
        Command::Sweep => run_sweep(cfg, &mut art),
    })?;
    out.passed = out.failing.is_empty();
    let manifest = json!({
        "tool": "hkcce",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cfg.command.name(),
        "config": cfg,
        "tolerances": {
            "ode_tol": cfg.ode_tol,
            "quad_tol": cfg.quad_tol,
            "T": cfg.t_max,
            "q_rel_tol": q_tolerance(cfg.ode_tol),
            "residual_tol_adapted": RESIDUAL_TOL_ADAPTED,
            "residual_tol_lee": RESIDUAL_TOL_LEE,
            "boundary_tol": BOUNDARY_TOL,
            "series_order": cfg.solver().order,
            "quad_points": QuadConfig::default().points,
        },
        "files": art.written,
        "passed": out.passed,
        "failing": out.failing,
        "wall_clock_seconds": start.elapsed().as_secs_f64(),
    });
    art.report_manifest(&manifest)?;
    out.lines.push(format!(
        "{}: {} files in {}; {}",
        cfg.command.name(),
        art.written.len(),
        cfg.out.display(),
        if out.passed { "all checks passed" } else { "FAILED" }
    ));
    out.files = art.written;
    Ok(out)
}

impl Artifacts {
    fn report_manifest(&mut self, v: &serde_json::Value) -> Result<()> {
        let mut text = serde_json::to_string_pretty(v)?;
        text.push('\n');
        self.raw("manifest.json", text.as_bytes())?;
        Ok(())
    }
}

fn par_cases<T: Send>(cases: &[Case], f: impl Fn(&Case) -> Result<T> + Sync + Send) -> Vec<Result<T>> {
    cases.par_iter().map(f).collect()
}

fn err_json(case: &Case, e: &Error) -> serde_json::Value {
    json!({ "case": case, "error": e.to_string() })
}

fn run_qcurv(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    let cases = grid(cfg, true);
    let solver = cfg.solver();
    let results = par_cases(&cases, |c| {
        q_curvature(&QCurvParams::new(c.n, c.gamma.expect("gamma"), c.k)?, &solver)
    });
    let tol = q_tolerance(cfg.ode_tol);
    let mut table = Table::new(&[
        "n",
        "gamma",
        "k",
        "Q_num",
        "Q_oracle",
        "rel_err",
        "t_match",
        "condition",
        "consistency_gap",
        "verdict",
    ]);
    let mut json_rows = Vec::new();
    let mut out = Outcome::default();
    let mut any_fail = false;
    for (c, r) in cases.iter().zip(&results) {
        let g = c.gamma.expect("gamma");
        match r {
            Ok(sr) => {
                let ok = sr.rel_err() <= tol;
                any_fail |= !ok;
                let verdict = if ok { "pass" } else { "fail" };
                table.push(vec![
                    c.n.to_string(),
                    num(g),
                    num(c.k),
                    num(sr.q_value),
                    num(sr.oracle()),
                    num(sr.rel_err()),
                    num(sr.t_match),
                    num(sr.condition_estimate),
                    num(sr.consistency_gap),
                    verdict.into(),
                ]);
                out.lines.push(format!(
                    "qcurv n={} gamma={g} k={} Q={:.6} oracle={:.6} rel_err={:.2e} {verdict}",
                    c.n,
                    c.k,
                    sr.q_value,
                    sr.oracle(),
                    sr.rel_err()
                ));
                json_rows.push(json!({ "case": c, "result": sr, "oracle": sr.oracle(), "rel_err": sr.rel_err(), "verdict": verdict }));
            }
            Err(e) => {
                any_fail = true;
                table.push(vec![
                    c.n.to_string(),
                    num(g),
                    num(c.k),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    "error".into(),
                ]);
                out.lines
                    .push(format!("qcurv n={} gamma={g} k={} error: {e}", c.n, c.k));
                json_rows.push(err_json(c, e));
            }
        }
    }
    let mut path = None;
    if cfg.emit_csv {
        path = Some(art.table("qcurv", &table)?);
    }
    if cfg.emit_json {
        path = Some(art.report("qcurv", &json_rows)?);
    }
    if any_fail {
        out.failing.extend(path);
    }
    Ok(out)
}

const REPORT_HEADER: [&str; 11] = [
    "name",
    "n",
    "gamma",
    "k",
    "lhs",
    "rhs",
    "gap",
    "remainder_1",
    "remainder_2",
    "err_est",
    "verdict",
];

fn report_row(r: &VerificationReport) -> Vec<String> {
    let rem = |i: usize| r.remainders.get(i).map(|x| num(x.value)).unwrap_or_default();
    vec![
        r.name.clone(),
        r.params.n.to_string(),
        opt_num(r.params.gamma),
        num(r.params.k),
        num(r.lhs),
        num(r.rhs),
        num(r.gap),
        rem(0),
        rem(1),
        num(r.err_est),
        r.verdict.as_str().into(),
    ]
}

fn error_row(name: &str, c: &Case) -> Vec<String> {
    let mut row = vec![name.to_string(), c.n.to_string(), opt_num(c.gamma), num(c.k)];
    row.extend(std::iter::repeat_n(String::new(), 6));
    row.push("error".into());
    row
}

/// Write per-case JSON, a summary table, and collect failures.
fn emit_reports(
    cfg: &RunConfig,
    art: &mut Artifacts,
    table_name: &str,
    items: Vec<(Case, String, Result<VerificationReport>)>,
) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut table = Table::new(&REPORT_HEADER);
    let mut failed_json = Vec::new();
    for (c, name, r) in &items {
        let file = format!("{name}-{}", c.tag());
        let (row, passed, line, value) = match r {
            Ok(rep) => (
                report_row(rep),
                rep.passed(),
                format!(
                    "{name} {} lhs={:.10e} rhs={:.10e} gap={:.3e} verdict={}",
                    c.tag(),
                    rep.lhs,
                    rep.rhs,
                    rep.gap,
                    rep.verdict.as_str()
                ),
                serde_json::to_value(rep)?,
            ),
            Err(e) => (
                error_row(name, c),
                false,
                format!("{name} {} error: {e}", c.tag()),
                err_json(c, e),
            ),
        };
        table.push(row);
        out.lines.push(line);
        if cfg.emit_json {
            let p = art.report(&file, &value)?;
            if !passed {
                out.failing.push(p);
            }
        } else if !passed {
            failed_json.push(file);
        }
    }
    if cfg.emit_csv {
        let p = art.table(table_name, &table)?;
        if !failed_json.is_empty() {
            out.failing.push(p);
        }
    }
    Ok(out)
}

fn run_verify(cfg: &RunConfig, target: VerifyTarget, art: &mut Artifacts) -> Result<Outcome> {
    let vc = verify_config(cfg);
    let with_gamma = target == VerifyTarget::HkAdapted;
    let cases = grid(cfg, with_gamma);
    let results = par_cases(&cases, |c| match target {
        VerifyTarget::HkAdapted => verify_adapted(c.n, c.gamma.expect("gamma"), c.k, &vc),
        VerifyTarget::HkCla => verify_cla(c.n, c.k, &vc),
        VerifyTarget::HkLee => verify_lee(c.n, c.k, &vc),
        _ => unreachable!("handled separately"),
    });
    let items = cases
        .into_iter()
        .zip(results)
        .map(|(c, r)| (c, target.name().to_string(), r))
        .collect();
    emit_reports(cfg, art, target.name(), items)
}

fn run_defect(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    let vc = verify_config(cfg);
    let mut cases = grid(cfg, true);
    cases.extend(grid(cfg, false));
    let results = par_cases(&cases, |c| {
        let kind = match c.gamma {
            Some(gamma) => Kind::Adapted { gamma },
            None => Kind::Lee,
        };
        defect_identity(kind, c.n, c.k, &vc)
    });
    let items = cases
        .into_iter()
        .zip(results)
        .map(|(c, r)| {
            let name = if c.gamma.is_some() {
                "defect-adapted"
            } else {
                "defect-lee"
            };
            (c, name.to_string(), r)
        })
        .collect();
    emit_reports(cfg, art, "defect", items)
}

fn run_prop21(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    let certs: Vec<_> = cfg.n.par_iter().map(|n| verify_prop21(*n)).collect();
    let mut out = Outcome::default();
    let mut table = Table::new(&["n", "beta_e2_coefficient", "expected", "verdict"]);
    for (n, c) in cfg.n.iter().zip(certs) {
        let c = c?;
        let expected = format!("1/{}", u64::from(*n) * u64::from(n - 2).pow(3));
        let beta = crate::jet_algebra::rational_string(&c.beta_e2_coefficient());
        let verdict = if c.passed() && beta == expected {
            "pass"
        } else {
            "fail"
        };
        table.push(vec![n.to_string(), beta, expected, verdict.into()]);
        let value = c.to_json();
        out.lines.push(serde_json::to_string(&value)?);
        if cfg.emit_json {
            let p = art.report(&format!("prop21-n{n}"), &value)?;
            if verdict == "fail" {
                out.failing.push(p);
            }
        } else if verdict == "fail" {
            out.failing.push(PathBuf::from(format!("prop21-n{n}")));
        }
    }
    if cfg.emit_csv {
        art.table("prop21", &table)?;
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct ResidualCase {
    case: Case,
    kind: Kind,
    suite: crate::compactification::ResidualSuite,
    positivity: crate::compactification::Positivity,
    boundary: crate::compactification::Extrapolation,
    boundary_expected: f64,
    boundary_rel_err: f64,
    passed: bool,
}

fn residual_case(c: &Case, cfg: &RunConfig) -> Result<(ResidualCase, Vec<u8>)> {
    let m = ModelSpace::new(c.n, c.k)?;
    let (g, tol): (CompactifiedGeometry, f64) = match c.gamma {
        Some(gamma) => {
            let sc = scatter(&QCurvParams::new(c.n, gamma, c.k)?, &cfg.solver())?;
            (build_adapted(&m, &sc)?, RESIDUAL_TOL_ADAPTED)
        }
        None => (build_lee(&m), RESIDUAL_TOL_LEE),
    };
    let suite = g.residual_suite(RESIDUAL_SAMPLES, tol)?;
    let positivity = g.positivity()?;
    let boundary = g.scalar_boundary()?;
    let expected = g.scalar_boundary_expected()?;
    let rel = (boundary.value - expected).abs() / expected.abs();
    let mut csv = Vec::new();
    g.write_profile_csv(&mut csv, RESIDUAL_SAMPLES)?;
    let passed = suite.passed() && positivity.passed && rel <= BOUNDARY_TOL;
    Ok((
        ResidualCase {
            case: *c,
            kind: g.kind,
            suite,
            positivity,
            boundary,
            boundary_expected: expected,
            boundary_rel_err: rel,
            passed,
        },
        csv,
    ))
}

fn run_residuals(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    let mut cases = grid(cfg, true);
    cases.extend(grid(cfg, false));
    let results = par_cases(&cases, |c| residual_case(c, cfg));
    let mut table = Table::new(&[
        "kind",
        "n",
        "gamma",
        "k",
        "res_rho",
        "res_T_or_J",
        "jbar_crosscheck",
        "hessian_trace",
        "min_scalar",
        "boundary",
        "boundary_expected",
        "boundary_rel_err",
        "verdict",
    ]);
    let mut out = Outcome::default();
    let mut any_fail = false;
    for (c, r) in cases.iter().zip(results) {
        let kind = if c.gamma.is_some() { "adapted" } else { "lee" };
        let name = format!("residuals-{kind}-{}", c.tag());
        match r {
            Ok((rc, csv)) => {
                let res = |i: usize| num(rc.suite.residuals[i].value);
                let verdict = if rc.passed { "pass" } else { "fail" };
                table.push(vec![
                    kind.into(),
                    c.n.to_string(),
                    opt_num(c.gamma),
                    num(c.k),
                    res(0),
                    res(1),
                    res(2),
                    res(3),
                    num(rc.positivity.min_scalar),
                    num(rc.boundary.value),
                    num(rc.boundary_expected),
                    num(rc.boundary_rel_err),
                    verdict.into(),
                ]);
                out.lines.push(format!(
                    "residuals {kind} {} max_res={:.2e} min_scalar={:.6e} boundary_rel_err={:.2e} {verdict}",
                    c.tag(),
                    rc.suite.residuals.iter().map(|r| r.value).fold(0.0, f64::max),
                    rc.positivity.min_scalar,
                    rc.boundary_rel_err
                ));
                if cfg.emit_csv {
                    art.raw(&format!("tables/profile-{kind}-{}.csv", c.tag()), &csv)?;
                }
                if cfg.emit_json {
                    let p = art.report(&name, &rc)?;
                    if !rc.passed {
                        out.failing.push(p);
                    }
                } else {
                    any_fail |= !rc.passed;
                }
            }
            Err(e) => {
                let mut row = vec![kind.to_string(), c.n.to_string(), opt_num(c.gamma), num(c.k)];
                row.extend(std::iter::repeat_n(String::new(), 8));
                row.push("error".into());
                table.push(row);
                out.lines.push(format!("residuals {kind} {} error: {e}", c.tag()));
                if cfg.emit_json {
                    out.failing.push(art.report(&name, &err_json(c, &e))?);
                } else {
                    any_fail = true;
                }
            }
        }
    }
    if cfg.emit_csv {
        let p = art.table("residuals", &table)?;
        if any_fail {
            out.failing.push(p);
        }
    }
    Ok(out)
}

fn run_asymptotic(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    let cases = grid(cfg, false);
    let quad = QuadConfig::default();
    let results = par_cases(&cases, |c| asymptotic_ratio(c.n, c.k, &log_grid(c.k, 20), &quad));
    let mut table = Table::new(&["n", "k", "r", "ratio", "abs_err"]);
    let mut out = Outcome::default();
    let mut any_fail = false;
    for (c, r) in cases.iter().zip(results) {
        let t = r?;
        for row in &t.rows {
            table.push(vec![
                row.n.to_string(),
                num(row.k),
                num(row.r),
                num(row.ratio),
                num(row.abs_err),
            ]);
        }
        let worst = t.rows.iter().map(|r| r.abs_err).fold(0.0, f64::max);
        out.lines.push(format!(
            "asymptotic {} max|ratio-1|={worst:.2e} {}",
            c.tag(),
            if t.passed { "pass" } else { "fail" }
        ));
        if cfg.emit_json {
            let p = art.report(&format!("asymptotic-{}", c.tag()), &t)?;
            if !t.passed {
                out.failing.push(p);
            }
        } else {
            any_fail |= !t.passed;
        }
    }
    if cfg.emit_csv {
        let p = art.table("asymptotic", &table)?;
        if any_fail {
            out.failing.push(p);
        }
    }
    Ok(out)
}

pub const SWEEP_HEADER: [&str; 10] = [
    "n", "gamma", "k", "Q_num", "Q_oracle", "rel_err", "lhs", "rhs", "gap", "verdict",
];

fn run_sweep(cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    let vc = verify_config(cfg);
    let cases = grid(cfg, true);
    let results = par_cases(&cases, |c| verify_adapted(c.n, c.gamma.expect("gamma"), c.k, &vc));
    let tol = q_tolerance(cfg.ode_tol);
    let mut table = Table::new(&SWEEP_HEADER);
    let mut json_rows = Vec::new();
    let mut out = Outcome::default();
    let mut any_fail = false;
    for (c, r) in cases.iter().zip(results) {
        let g = c.gamma.expect("gamma");
        match r {
            Ok(rep) => {
                let q = rep.q_value.expect("adapted reports carry Q");
                let oracle = crate::special_fn::sphere_q_value(c.n, g, c.k)?;
                let rel = (q - oracle).abs() / oracle.abs();
                let verdict = if rel > tol { "fail" } else { rep.verdict.as_str() };
                any_fail |= verdict == "fail" || !rep.passed();
                table.push(vec![
                    c.n.to_string(),
                    num(g),
                    num(c.k),
                    num(q),
                    num(oracle),
                    num(rel),
                    num(rep.lhs),
                    num(rep.rhs),
                    num(rep.gap),
                    verdict.into(),
                ]);
                out.lines.push(format!(
                    "sweep {} Q={q:.10} rel_err={rel:.2e} gap={:.3e} {verdict}",
                    c.tag(),
                    rep.gap
                ));
                json_rows.push(json!({
                    "n": c.n, "gamma": g, "k": c.k, "Q_num": q, "Q_oracle": oracle, "rel_err": rel,
                    "lhs": rep.lhs, "rhs": rep.rhs, "gap": rep.gap, "verdict": verdict,
                }));
            }
            Err(e) => {
                any_fail = true;
                let mut row = vec![c.n.to_string(), num(g), num(c.k)];
                row.extend(std::iter::repeat_n(String::new(), 6));
                row.push("error".into());
                table.push(row);
                out.lines.push(format!("sweep {} error: {e}", c.tag()));
                json_rows.push(err_json(c, &e));
            }
        }
    }
    let mut path = None;
    if cfg.emit_csv {
        path = Some(art.table("sweep", &table)?);
    }
    if cfg.emit_json {
        path = Some(art.report("sweep", &json_rows)?);
    }
    if any_fail {
        out.failing.extend(path);
    }
    Ok(out)
}
