use std::ffi::{c_char, CStr};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use hkcce_ffi::*;

#[test]
fn scalar_functions() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(hkcce_gamma(5.0, &mut v), HkcceStatus::Ok);
        assert!((v - 24.0).abs() < 1e-12);
        assert_eq!(hkcce_d_gamma(0.5, &mut v), HkcceStatus::Ok);
        assert!((v + 1.0).abs() < 1e-12);
        assert_eq!(hkcce_hk_constant(4, 0.5, &mut v), HkcceStatus::Ok);
        assert!((v - 5.0).abs() < 1e-12);
        assert_eq!(hkcce_sphere_q_oracle(4, 0.5, 4.0, &mut v), HkcceStatus::Ok);
        assert!((v - 2.0).abs() < 1e-12);
        assert_eq!(hkcce_gamma(-2.0, &mut v), HkcceStatus::Domain);
        assert!(last_error().unwrap().contains("pole"), "{:?}", last_error());
        assert_eq!(hkcce_gamma(1.0, ptr::null_mut()), HkcceStatus::NullPointer);
    }
}

#[test]
fn scattering_handle_roundtrip() {
    let mut h: *mut HkcceScattering = ptr::null_mut();
    let (mut q, mut s, mut oracle) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(
            hkcce_scattering_solve(5, 0.4, 0.5, 1e-9, 0.0, &mut h),
            HkcceStatus::Ok
        );
        assert!(!h.is_null());
        assert_eq!(hkcce_scattering_q(h, &mut q), HkcceStatus::Ok);
        assert_eq!(hkcce_scattering_value(h, &mut s), HkcceStatus::Ok);
        hkcce_scattering_free(h);
        hkcce_scattering_free(ptr::null_mut());
        hkcce_sphere_q_oracle(5, 0.4, 0.5, &mut oracle);
        assert_eq!(hkcce_scattering_q(ptr::null(), &mut q), HkcceStatus::NullPointer);
        assert_eq!(
            hkcce_scattering_solve(5, 0.4, -1.0, 0.0, 0.0, &mut h),
            HkcceStatus::Domain
        );
        assert_eq!(
            hkcce_scattering_solve(5, 0.4, 1.0, 1.0, 0.0, &mut h),
            HkcceStatus::Config
        );
    }
    assert!((q - oracle).abs() <= 1e-6 * oracle);
    assert!(s < 0.0);
}

#[test]
fn reports_cross_the_boundary() {
    let mut r = HkcceReport {
        lhs: 0.0,
        rhs: 0.0,
        gap: 0.0,
        err_est: 0.0,
        remainder_1: 0.0,
        remainder_2: 0.0,
        verdict: HkcceVerdict::Fail,
    };
    unsafe {
        assert_eq!(hkcce_verify_cla(4, 1.0, 0.0, &mut r), HkcceStatus::Ok);
        assert_eq!(r.verdict, HkcceVerdict::Equality);
        assert!((r.lhs - 2.0 * std::f64::consts::PI.powi(2) / 3.0).abs() < 1e-6);
        assert_eq!(hkcce_verify_adapted(4, 0.25, 1.0, 0.0, &mut r), HkcceStatus::Ok);
        assert_eq!(r.verdict, HkcceVerdict::Strict);
        assert!(r.remainder_1 > 0.0 && r.remainder_2 > 0.0);
        assert_eq!(hkcce_defect_adapted(4, 0.75, 2.0, 1e-5, &mut r), HkcceStatus::Ok);
        assert_eq!(r.verdict, HkcceVerdict::Equality);
        assert_eq!(hkcce_defect_lee(5, 1.0, 0.0, &mut r), HkcceStatus::Ok);
        assert!(r.remainder_1.abs() < 1e-8 && r.remainder_2.abs() < 1e-8);
        assert_eq!(
            hkcce_verify_lee(4, 1.0, 0.0, ptr::null_mut()),
            HkcceStatus::NullPointer
        );
    }
}

#[test]
fn certificate_string() {
    let mut s: *mut c_char = ptr::null_mut();
    unsafe {
        assert_eq!(hkcce_prop21_json(6, &mut s), HkcceStatus::Ok);
        let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
        hkcce_string_free(s);
        assert!(text.contains("\"1/384\""), "{text}");
        assert_eq!(hkcce_prop21_json(4, &mut s), HkcceStatus::Domain);
    }
}

#[test]
fn header_lists_every_export() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/hkcce.h")).unwrap();
    let src = std::fs::read_to_string(dir.join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|s| s.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15);
    for f in exports {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("typedef struct HkcceScattering HkcceScattering;"));
}

/// Compile and run a C program against the static library when a C compiler
/// and the archive are available.
#[test]
fn c_program_links() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir =
        PathBuf::from(env!("CARGO_TARGET_TMPDIR"))
            .parent()
            .unwrap()
            .join(if cfg!(debug_assertions) {
                "debug"
            } else {
                "release"
            });
    let lib = profile_dir.join("libhkcce_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library at {} or no cc", lib.display());
        return;
    }
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("hkcce_smoke");
    let status = Command::new("cc")
        .arg("-I")
        .arg(dir.join("include"))
        .arg(dir.join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
