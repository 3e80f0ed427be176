use std::path::Path;
use std::process::{Command, Output};

fn hkcce(args: &[&str], out: Option<&Path>, env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hkcce"));
    cmd.args(args).env_remove("HKCCE_OUT");
    if let Some(o) = out {
        cmd.arg("--out").arg(o);
    }
    if let Some(e) = env_out {
        cmd.env("HKCCE_OUT", e);
    }
    cmd.output().expect("spawn hkcce")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn qcurv_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = hkcce(&["qcurv", "--n", "4", "--gamma", "0.5"], Some(dir.path()), None);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("tables/qcurv.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    let header: Vec<&str> = lines[0].split(',').collect();
    let row: Vec<&str> = lines[1].split(',').collect();
    let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    let q: f64 = col("Q_num").parse().unwrap();
    assert!((q - 1.0).abs() < 5e-7);
    assert!(col("rel_err").parse::<f64>().unwrap() <= 1e-6);
}

#[test]
fn prop21_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let o = hkcce(&["verify", "prop21", "--n", "5"], Some(dir.path()), None);
    assert_eq!(o.status.code(), Some(0));
    let cert = json(&dir.path().join("reports/prop21-n5.json"));
    assert_eq!(cert["beta_e2_coefficient"], "1/135");
    assert_eq!(cert["verdict"], "equality");
}

#[test]
fn adapted_strict() {
    let dir = tempfile::tempdir().unwrap();
    let o = hkcce(
        &["verify", "hk-adapted", "--gamma", "0.25", "--n", "4", "--k", "1"],
        Some(dir.path()),
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let rep = json(&dir.path().join("reports/hk-adapted-n4-g0.25-k1.json"));
    assert_eq!(rep["verdict"], "strict");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        hkcce(&["qcurv", "--gamma", "0.99"], Some(dir.path()), None)
            .status
            .code(),
        Some(64)
    );
    assert_eq!(hkcce(&[], Some(dir.path()), None).status.code(), Some(64));
    assert_eq!(
        hkcce(&["verify", "prop21", "--n", "4"], Some(dir.path()), None)
            .status
            .code(),
        Some(64)
    );
    assert_eq!(hkcce(&["--help"], None, None).status.code(), Some(0));

    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"gama": [0.5]}"#).unwrap();
    let o = hkcce(
        &["qcurv", "--config", cfg.to_str().unwrap()],
        Some(dir.path()),
        None,
    );
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn deterministic_csv() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "qcurv",
        "--n",
        "4,5",
        "--gamma",
        "0.25,0.75",
        "--k",
        "1,2",
        "--jobs",
        "3",
    ];
    assert!(hkcce(&args, Some(a.path()), None).status.success());
    assert!(hkcce(&args, Some(b.path()), None).status.success());
    let read = |d: &Path| std::fs::read(d.join("tables/qcurv.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn manifest_lists_tolerances_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = hkcce(
        &[
            "residuals",
            "--n",
            "4",
            "--gamma",
            "0.5",
            "--k",
            "1",
            "--ode-tol",
            "1e-9",
            "--quad-tol",
            "1e-7",
        ],
        Some(dir.path()),
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let m = json(&dir.path().join("manifest.json"));
    let tol = &m["tolerances"];
    assert_eq!(tol["ode_tol"], 1e-9);
    assert_eq!(tol["quad_tol"], 1e-7);
    for key in [
        "T",
        "residual_tol_adapted",
        "residual_tol_lee",
        "boundary_tol",
        "q_rel_tol",
    ] {
        assert!(tol.get(key).is_some(), "missing {key}");
    }
    assert_eq!(m["passed"], true);
    assert!(m["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
    for f in m["files"].as_array().unwrap() {
        assert!(dir.path().join(f.as_str().unwrap()).is_file(), "{f}");
    }
}

#[test]
fn sweep_has_45_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = hkcce(&["sweep", "--jobs", "4"], Some(dir.path()), None);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("tables/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 46);
    assert!(csv.lines().skip(1).all(|l| !l.ends_with(",fail")));
}

#[test]
fn output_directory_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let flag = dir.path().join("flag");
    let env = dir.path().join("env");
    let file = dir.path().join("file");
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"out": {:?}, "gamma": [0.25, 0.5, 0.75]}}"#,
            file.to_str().unwrap()
        ),
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();

    // file only
    assert!(hkcce(&["qcurv", "--n", "4", "--config", cfg], None, None)
        .status
        .success());
    assert!(file.join("manifest.json").is_file());
    let rows = std::fs::read_to_string(file.join("tables/qcurv.csv"))
        .unwrap()
        .lines()
        .count();
    assert_eq!(rows, 4);

    // env beats file
    assert!(hkcce(&["qcurv", "--n", "4", "--config", cfg], None, Some(&env))
        .status
        .success());
    assert!(env.join("manifest.json").is_file());

    // flag beats both, and a gamma flag replaces the file's list
    assert!(hkcce(
        &["qcurv", "--n", "4", "--gamma", "0.5", "--config", cfg],
        Some(&flag),
        Some(&env)
    )
    .status
    .success());
    let rows = std::fs::read_to_string(flag.join("tables/qcurv.csv"))
        .unwrap()
        .lines()
        .count();
    assert_eq!(rows, 2);
}
