use std::ffi::{c_char, CStr};
use std::ptr;

use chiralchain::gaussian::ground_state;
use chiralchain::spincorr::{spin_correlator, Axis};
use chiralchain::ModelParams;
use chiralchain_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    unsafe { chiral_last_error(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn model(gamma: f64, d: f64, h: f64, alpha: f64, n: usize) -> *mut ChiralModel {
    let mut m = ptr::null_mut();
    let st = unsafe { chiral_model_new(gamma, d, h, alpha, n, true, &mut m) };
    assert_eq!(st, ChiralStatus::Ok, "{}", last_error());
    m
}

#[test]
fn model_values_match_the_library() {
    let m = model(0.5, 1.5, 0.5, 1.3, 64);
    let state = ground_state(&ModelParams::new(0.5, 1.5, 0.5, 1.3, 64).unwrap()).unwrap();
    let mut v = 0.0;
    unsafe {
        assert_eq!(chiral_model_spin_correlator(m, ChiralAxis::X, ChiralAxis::Y, 3, &mut v), ChiralStatus::Ok);
        assert_eq!(v, spin_correlator(&state, Axis::X, Axis::Y, 3).unwrap());
        assert_eq!(chiral_model_energy(m, &mut v), ChiralStatus::Ok);
        assert_eq!(v, state.energy());
        let mut g = -1.0;
        assert_eq!(chiral_model_gap(m, &mut g), ChiralStatus::Ok);
        assert!(g >= 0.0);
        assert_eq!(chiral_model_block_entropy(m, 8, &mut v), ChiralStatus::Ok);
        assert!(v > 0.0);
        assert_eq!(chiral_model_mutual_information(m, 2, &mut v), ChiralStatus::Ok);
        assert!(v >= 0.0);
        let (mut c, mut r2) = (0.0, 0.0);
        assert_eq!(chiral_model_central_charge(m, 4, 16, &mut c, &mut r2), ChiralStatus::Ok);
        assert!(c.is_finite() && r2.is_finite());
        chiral_model_free(m);
    }
}

#[test]
fn invalid_input_reports_status_and_message() {
    let mut m = ptr::null_mut();
    let st = unsafe { chiral_model_new(0.5, 0.0, 1.0, 2.0, 7, true, &mut m) };
    assert_eq!(st, ChiralStatus::InvalidParameter);
    assert!(m.is_null());
    assert!(!last_error().is_empty());

    let st = unsafe { chiral_model_new(0.5, 0.0, 1.0, 2.0, 8, true, ptr::null_mut()) };
    assert_eq!(st, ChiralStatus::NullPointer);

    let m = model(1.0, 0.0, 1.0, 2.0, 16);
    let mut v = 0.0;
    unsafe {
        assert_eq!(chiral_model_zz_correlator(m, 100, &mut v), ChiralStatus::OutOfRange);
        assert_eq!(chiral_model_gap(ptr::null(), &mut v), ChiralStatus::NullPointer);
        chiral_model_free(m);
        chiral_model_free(ptr::null_mut());
    }
}

#[test]
fn error_message_truncates_and_reports_full_length() {
    unsafe { chiral_model_new(0.5, 0.0, 1.0, 2.0, 3, true, &mut ptr::null_mut()) };
    let full = unsafe { chiral_last_error(ptr::null_mut(), 0) };
    let mut buf = [1 as c_char; 5];
    assert_eq!(unsafe { chiral_last_error(buf.as_mut_ptr(), buf.len()) }, full);
    assert_eq!(buf[4], 0);
}

#[test]
fn quench_calls_round_trip() {
    let pre = model(1.0, 1.3, -0.5, 1.1, 64);
    let post = model(1.0, 1.3, -0.5, 2.1, 64);
    let mismatched = model(1.0, 1.3, -0.5, 2.1, 32);
    unsafe {
        let mut q = ptr::null_mut();
        assert_ne!(chiral_quench_new(pre, mismatched, &mut q), ChiralStatus::Ok);
        assert_eq!(chiral_quench_new(pre, post, &mut q), ChiralStatus::Ok, "{}", last_error());

        let times = [1.0, 2.0, 4.0];
        let (mut re, mut im) = ([0.0; 3], [0.0; 3]);
        let st = chiral_quench_delta_correlation(q, 1, 2, times.as_ptr(), 3, re.as_mut_ptr(), im.as_mut_ptr());
        assert_eq!(st, ChiralStatus::Ok, "{}", last_error());
        assert!(re.iter().chain(&im).all(|v| v.is_finite()));

        let (mut s0, mut s1) = (1.0, 0.0);
        assert_eq!(chiral_quench_block_entropy(q, 8, 0.0, &mut s0), ChiralStatus::Ok);
        assert_eq!(chiral_quench_block_entropy(q, 8, 5.0, &mut s1), ChiralStatus::Ok);
        let mut ground = 0.0;
        chiral_model_block_entropy(pre, 8, &mut ground);
        assert!((s0 - ground).abs() < 1e-10);
        assert_eq!(chiral_quench_block_entropy(q, 8, -1.0, &mut s1), ChiralStatus::InvalidParameter);

        let (mut mi, mut cxx) = ([0.0; 8], [0.0; 8]);
        assert_eq!(chiral_quench_steady_profile(q, 8, mi.as_mut_ptr(), cxx.as_mut_ptr()), ChiralStatus::Ok);
        assert!(mi.iter().all(|&v| v >= 0.0));
        assert_eq!(chiral_quench_steady_profile(q, 33, mi.as_mut_ptr(), cxx.as_mut_ptr()), ChiralStatus::OutOfRange);

        chiral_quench_free(q);
        for m in [pre, post, mismatched] {
            chiral_model_free(m);
        }
    }
}

#[test]
fn pfaffian_of_a_two_by_two_block() {
    let re = [0.0, 2.0, -2.0, 0.0];
    let im = [0.0, 1.0, -1.0, 0.0];
    let (mut a, mut b) = (0.0, 0.0);
    assert_eq!(unsafe { chiral_pfaffian(2, re.as_ptr(), im.as_ptr(), &mut a, &mut b) }, ChiralStatus::Ok);
    assert_eq!((a, b), (2.0, 1.0));
    let bad = [0.0, 1.0, 1.0, 0.0];
    let st = unsafe { chiral_pfaffian(2, bad.as_ptr(), im.as_ptr(), &mut a, &mut b) };
    assert_eq!(st, ChiralStatus::NotAntisymmetric);
}

#[test]
fn version_matches_the_package() {
    let v = unsafe { CStr::from_ptr(chiral_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/chiralchain.h")).unwrap();
    assert!(header.contains("#ifndef CHIRALCHAIN_H"));
    assert!(header.contains("typedef struct ChiralModel ChiralModel;"));
    for f in [
        "chiral_last_error",
        "chiral_version",
        "chiral_model_new",
        "chiral_model_free",
        "chiral_model_gap",
        "chiral_model_energy",
        "chiral_model_magnetization",
        "chiral_model_spin_correlator",
        "chiral_model_zz_correlator",
        "chiral_model_chiral_order",
        "chiral_model_mutual_information",
        "chiral_model_block_entropy",
        "chiral_model_central_charge",
        "chiral_quench_new",
        "chiral_quench_free",
        "chiral_quench_delta_correlation",
        "chiral_quench_block_entropy",
        "chiral_quench_steady_profile",
        "chiral_pfaffian",
    ] {
        assert!([" ", "*"].iter().any(|p| header.contains(&format!("{p}{f}("))), "{f} missing");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("t.c");
    std::fs::write(&src, "#include \"chiralchain.h\"\nint main(void) { return CHIRAL_STATUS_OK; }\n").unwrap();
    let status = std::process::Command::new(cc)
        .arg("-fsyntax-only")
        .arg("-I")
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok())
        .ok_or(())
}
