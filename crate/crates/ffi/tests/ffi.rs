use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use openq_ffi::*;

fn last_error() -> String {
    let p = oq_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

unsafe fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_string();
    oq_string_free(p);
    s
}

fn qubit(re: [f64; 2], im: [f64; 2]) -> *mut OqState {
    let mut h = ptr::null_mut();
    let status = unsafe { oq_state_new([2usize].as_ptr(), 1, re.as_ptr(), im.as_ptr(), &mut h) };
    assert_eq!(status, OqStatus::Ok);
    h
}

#[test]
fn state_density_round_trip() {
    unsafe {
        let s = qubit([1.0, 1.0], [0.0, 0.0]);
        let mut rho = ptr::null_mut();
        assert_eq!(oq_state_to_density(s, &mut rho), OqStatus::Ok);
        let (mut re, mut im, mut dim, mut p) = (0.0, 0.0, 0usize, 0.0);
        assert_eq!(oq_density_dim(rho, &mut dim), OqStatus::Ok);
        assert_eq!(dim, 2);
        assert_eq!(oq_density_get(rho, 0, 1, &mut re, &mut im), OqStatus::Ok);
        assert!((re - 0.5).abs() < 1e-15 && im.abs() < 1e-15);
        assert_eq!(oq_density_purity(rho, &mut p), OqStatus::Ok);
        assert!((p - 1.0).abs() < 1e-14);
        assert_eq!(oq_density_get(rho, 2, 0, &mut re, &mut im), OqStatus::Invalid);
        assert!(last_error().contains("outside"));
        oq_density_free(rho);
        oq_state_free(s);
    }
}

#[test]
fn partial_trace_of_product_state() {
    unsafe {
        let re = [1.0, 0.0, 0.0, 0.0];
        let mut s = ptr::null_mut();
        assert_eq!(oq_state_new([2usize, 2].as_ptr(), 2, re.as_ptr(), ptr::null(), &mut s), OqStatus::Ok);
        let mut rho = ptr::null_mut();
        oq_state_to_density(s, &mut rho);
        let mut reduced = ptr::null_mut();
        assert_eq!(oq_density_partial_trace(rho, [1usize].as_ptr(), 1, &mut reduced), OqStatus::Ok);
        let (mut a, mut b) = (0.0, 0.0);
        oq_density_get(reduced, 0, 0, &mut a, &mut b);
        assert!((a - 1.0).abs() < 1e-15);
        for h in [rho, reduced] {
            oq_density_free(h);
        }
        oq_state_free(s);
    }
}

#[test]
fn dephasing_trajectory_decays() {
    unsafe {
        let s = qubit([1.0, 1.0], [0.0, 0.0]);
        let mut rho = ptr::null_mut();
        oq_state_to_density(s, &mut rho);
        let times = [0.0, 0.5, 1.0];
        let mut traj = ptr::null_mut();
        assert_eq!(oq_evolve_qubit_lindblad(0, 0.7, 0.0, rho, times.as_ptr(), 3, &mut traj), OqStatus::Ok);
        let mut n = 0usize;
        oq_trajectory_len(traj, &mut n);
        assert_eq!(n, 3);
        let mut last = ptr::null_mut();
        assert_eq!(oq_trajectory_state(traj, 2, &mut last), OqStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        oq_density_get(last, 0, 1, &mut re, &mut im);
        assert!((re - 0.5 * (-1.4f64).exp()).abs() < 1e-8);
        let mut csv = ptr::null_mut();
        assert_eq!(oq_trajectory_csv(traj, &mut csv), OqStatus::Ok);
        assert!(take_string(csv).starts_with("t,re_00"));
        assert_eq!(oq_trajectory_state(traj, 3, &mut last), OqStatus::Invalid);
        assert_eq!(oq_evolve_qubit_lindblad(9, 0.7, 0.0, rho, times.as_ptr(), 3, &mut traj), OqStatus::Invalid);
        oq_density_free(last);
        oq_trajectory_free(traj);
        oq_density_free(rho);
        oq_state_free(s);
    }
}

#[test]
fn closed_evolution_of_an_eigenstate_is_static() {
    unsafe {
        let z = [1.0, 0.0, 0.0, -1.0];
        let mut h = ptr::null_mut();
        assert_eq!(oq_operator_new([2usize].as_ptr(), 1, z.as_ptr(), ptr::null(), &mut h), OqStatus::Ok);
        let s = qubit([1.0, 0.0], [0.0, 0.0]);
        let mut rho = ptr::null_mut();
        oq_state_to_density(s, &mut rho);
        let mut traj = ptr::null_mut();
        assert_eq!(oq_evolve_closed(h, rho, [3.0].as_ptr(), 1, &mut traj), OqStatus::Ok);
        let mut at = ptr::null_mut();
        oq_trajectory_state(traj, 0, &mut at);
        let (mut re, mut im) = (0.0, 0.0);
        oq_density_get(at, 0, 0, &mut re, &mut im);
        assert!((re - 1.0).abs() < 1e-14);
        let bad = [1.0, 2.0, 0.0, 1.0];
        let mut nh = ptr::null_mut();
        assert_eq!(oq_operator_new([2usize].as_ptr(), 1, bad.as_ptr(), ptr::null(), &mut nh), OqStatus::Ok);
        assert_eq!(oq_evolve_closed(nh, rho, [1.0].as_ptr(), 1, &mut traj), OqStatus::Invalid);
        oq_density_free(at);
        oq_trajectory_free(traj);
        oq_operator_free(h);
        oq_operator_free(nh);
        oq_density_free(rho);
        oq_state_free(s);
    }
}

#[test]
fn density_validation() {
    unsafe {
        let not_psd = [1.5, 0.0, 0.0, -0.5];
        let mut rho = ptr::null_mut();
        assert_eq!(oq_density_new([2usize].as_ptr(), 1, not_psd.as_ptr(), ptr::null(), &mut rho), OqStatus::Invalid);
        assert!(rho.is_null());
        let mixed = [0.5, 0.0, 0.0, 0.5];
        assert_eq!(oq_density_new([2usize].as_ptr(), 1, mixed.as_ptr(), ptr::null(), &mut rho), OqStatus::Ok);
        let mut p = 0.0;
        oq_density_purity(rho, &mut p);
        assert!((p - 0.5).abs() < 1e-15);
        oq_density_free(rho);
    }
}

#[test]
fn visibility_equals_record_overlap() {
    unsafe {
        let mut v = 0.0;
        assert_eq!(oq_visibility_for_overlap(0.3, 0.4, 4096, &mut v), OqStatus::Ok);
        assert!((v - 0.5).abs() < 1e-6);
        let e1 = qubit([1.0, 0.0], [0.0, 0.0]);
        let e2 = qubit([1.0, 1.0], [0.0, 0.0]);
        assert_eq!(oq_visibility_for_records(e1, e2, 4096, &mut v), OqStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        oq_state_inner(e2, e1, &mut re, &mut im);
        assert!((v - re.hypot(im)).abs() < 1e-6);
        assert_eq!(oq_visibility_for_overlap(2.0, 0.0, 4096, &mut v), OqStatus::Invalid);
        oq_state_free(e1);
        oq_state_free(e2);
    }
}

#[test]
fn single_mode_exponent_closed_form() {
    unsafe {
        let mut j = ptr::null_mut();
        assert_eq!(oq_spectral_single_mode(0.4, 0.9, 0.0, &mut j), OqStatus::Ok);
        let n = 6000;
        let mut gamma = vec![0.0; n + 1];
        let mut phi = vec![0.0; n + 1];
        assert_eq!(oq_decoherence_exponent(j, 1.5, 6.0, n, gamma.as_mut_ptr(), phi.as_mut_ptr(), n + 1), OqStatus::Ok);
        let expect = 1.5 * 1.5 * 0.4 * (1.0 - (0.9f64 * 6.0).cos()) / 0.81;
        assert!((gamma[n] - expect).abs() / expect < 1e-6);
        assert_eq!(oq_decoherence_exponent(j, 1.5, 6.0, n, gamma.as_mut_ptr(), ptr::null_mut(), n), OqStatus::BufferTooSmall);
        oq_spectral_free(j);
        let mut bad = ptr::null_mut();
        assert_eq!(oq_spectral_ohmic(-1.0, 1.0, 0.0, &mut bad), OqStatus::Invalid);
        let mut s3 = ptr::null_mut();
        assert_eq!(oq_spectral_supraohmic(3.0, 1.0, 1.0, 0.0, &mut s3), OqStatus::Ok);
        oq_spectral_free(s3);
    }
}

#[test]
fn dfs_dimensions_follow_binomials() {
    unsafe {
        let mut dims = [0usize; 8];
        let mut count = 0usize;
        assert_eq!(oq_dfs_dimensions(3, dims.as_mut_ptr(), 8, &mut count), OqStatus::Ok);
        assert_eq!(&dims[..count], &[1, 3, 3, 1]);
        assert_eq!(oq_dfs_dimensions(3, dims.as_mut_ptr(), 2, &mut count), OqStatus::BufferTooSmall);
        assert_eq!(count, 4);
    }
}

#[test]
fn qec_sweep_recovers_matched_rotations() {
    unsafe {
        let logical = qubit([0.6, 0.0], [0.0, 0.8]);
        let thetas: Vec<f64> = (0..=36).map(|k| 5.0 * k as f64).collect();
        let mut fid = vec![0.0; thetas.len()];
        let code = CString::new("phaseflip").unwrap();
        let status = oq_qec_fidelity_sweep(code.as_ptr(), logical, b'z' as _, 1, thetas.as_ptr(), thetas.len(), fid.as_mut_ptr());
        assert_eq!(status, OqStatus::Ok);
        assert!(fid.iter().all(|f| (f - 1.0).abs() < 1e-10));
        let bad = CString::new("steane").unwrap();
        let status = oq_qec_fidelity_sweep(bad.as_ptr(), logical, b'z' as _, 1, thetas.as_ptr(), 1, fid.as_mut_ptr());
        assert_eq!(status, OqStatus::Invalid);
        assert!(last_error().contains("steane"));
        oq_state_free(logical);
    }
}

#[test]
fn radical_pair_zero_field_yield() {
    unsafe {
        let json = CString::new(r#"{"a_iso": 0.5, "b_static": [0, 0, 0]}"#).unwrap();
        let mut m = ptr::null_mut();
        assert_eq!(oq_radical_pair_from_json(json.as_ptr(), &mut m), OqStatus::Ok);
        let mut y = OqYield::default();
        assert_eq!(oq_radical_pair_yield(m, 0.0, &mut y), OqStatus::Ok);
        let w = std::f64::consts::TAU * 1e6 * 28.025 * 0.5;
        let k = 1e6;
        let closed = 0.625 + 0.375 * k * k / (k * k + w * w);
        assert!((y.singlet - closed).abs() < y.surviving + 1e-9);
        assert!((y.singlet + y.triplet + y.surviving - 1.0).abs() < 1e-6);
        let mut ps = [0.0; 2];
        let free = CString::new(r#"{"k_s": 0, "k_t": 0}"#).unwrap();
        let mut m0 = ptr::null_mut();
        oq_radical_pair_from_json(free.as_ptr(), &mut m0);
        assert_eq!(oq_radical_pair_singlet_probability(m0, [0.0, 1e-9].as_ptr(), 2, ps.as_mut_ptr()), OqStatus::Ok);
        assert_eq!(ps[0], 1.0);
        let typo = CString::new(r#"{"a_isso": 0.5}"#).unwrap();
        let mut bad = ptr::null_mut();
        assert_eq!(oq_radical_pair_from_json(typo.as_ptr(), &mut bad), OqStatus::Invalid);
        assert!(last_error().contains("a_isso"));
        oq_radical_pair_free(m);
        oq_radical_pair_free(m0);
    }
}

#[test]
fn rf_scan_through_the_abi() {
    unsafe {
        let json = CString::new(format!(
            r#"{{"a_iso": {}, "b_static": [0,0,0], "rf_amplitude": 0.1, "rf_frequency": 1.4e6, "k_s": 1e4, "k_t": 1e4}}"#,
            1.4 / 28.025
        ))
        .unwrap();
        let mut m = ptr::null_mut();
        assert_eq!(oq_radical_pair_from_json(json.as_ptr(), &mut m), OqStatus::Ok);
        let freqs = [0.7e6, 1.4e6, 2.8e6];
        let mut y = [0.0; 3];
        assert_eq!(oq_radical_pair_rf_scan(m, freqs.as_ptr(), 3, 0.0, y.as_mut_ptr()), OqStatus::Ok);
        let mut base = OqYield::default();
        let plain = CString::new(format!(r#"{{"a_iso": {}, "b_static": [0,0,0], "k_s": 1e4, "k_t": 1e4}}"#, 1.4 / 28.025)).unwrap();
        let mut m0 = ptr::null_mut();
        oq_radical_pair_from_json(plain.as_ptr(), &mut m0);
        oq_radical_pair_yield(m0, 0.0, &mut base);
        let dev: Vec<f64> = y.iter().map(|v| (v - base.singlet).abs()).collect();
        assert!(dev[1] > dev[0] && dev[1] > dev[2], "{dev:?}");
        oq_radical_pair_free(m);
        oq_radical_pair_free(m0);
    }
}

#[test]
fn t_test_and_power() {
    unsafe {
        let a = [30.0, 31.0, 34.0, 36.0, 39.0];
        let b = [28.0, 30.0, 33.0, 34.0, 36.0];
        let mut t = OqTTest::default();
        assert_eq!(oq_paired_t_test(a.as_ptr(), b.as_ptr(), 5, OqDirection::Greater, &mut t), OqStatus::Ok);
        assert!((t.t_stat - 4.810702354423639).abs() < 1e-10);
        assert!((t.p_one_tailed - 0.00429045936096239).abs() < 1e-10);
        assert_eq!(t.df, 4);
        let mut p = 0.0;
        assert_eq!(oq_power(1.0, 1.0, 5, 0.05, OqDirection::Greater, &mut p), OqStatus::Ok);
        assert!((p - 0.5797373588621886).abs() < 1e-8);
        assert_eq!(oq_power(1.0, -1.0, 5, 0.05, OqDirection::Greater, &mut p), OqStatus::Invalid);
        assert_eq!(oq_paired_t_test(a.as_ptr(), b.as_ptr(), 1, OqDirection::Less, &mut t), OqStatus::Invalid);
    }
}

#[test]
fn stats_report_and_missing_file() {
    unsafe {
        let mut json = ptr::null_mut();
        assert_eq!(oq_stats_report_json(ptr::null(), &mut json), OqStatus::Ok);
        let value: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(value["runs"].as_array().unwrap().len(), 5);
        let path = CString::new("/nonexistent/trials.csv").unwrap();
        assert_eq!(oq_stats_report_json(path.as_ptr(), &mut json), OqStatus::Io);
        assert!(last_error().contains("/nonexistent/trials.csv"));
    }
}

#[test]
fn cli_through_the_abi() {
    unsafe {
        let args: Vec<CString> = ["qec", "--steps", "3"].iter().map(|a| CString::new(*a).unwrap()).collect();
        let ptrs: Vec<_> = args.iter().map(|a| a.as_ptr()).collect();
        let (mut out, mut err, mut code) = (ptr::null_mut(), ptr::null_mut(), -1);
        assert_eq!(oq_cli_run(ptrs.as_ptr(), ptrs.len(), &mut out, &mut err, &mut code), OqStatus::Ok);
        assert_eq!(code, 0);
        assert_eq!(take_string(out).lines().count(), 4);
        assert_eq!(take_string(err), "");
        let bad = [CString::new("teleport").unwrap()];
        let ptrs: Vec<_> = bad.iter().map(|a| a.as_ptr()).collect();
        assert_eq!(oq_cli_run(ptrs.as_ptr(), 1, ptr::null_mut(), &mut err, &mut code), OqStatus::Ok);
        assert_eq!(code, 2);
        assert!(take_string(err).contains("usage"));
    }
}

#[test]
fn null_pointers_are_reported() {
    unsafe {
        assert_eq!(oq_density_purity(ptr::null(), ptr::null_mut()), OqStatus::NullPointer);
        assert!(last_error().contains("rho"));
        let mut v = 0.0;
        assert_eq!(oq_state_new(ptr::null(), 1, [1.0].as_ptr(), ptr::null(), ptr::null_mut()), OqStatus::NullPointer);
        assert_eq!(oq_visibility_for_records(ptr::null(), ptr::null(), 16, &mut v), OqStatus::NullPointer);
        oq_state_free(ptr::null_mut());
        oq_string_free(ptr::null_mut());
        let bytes = [0xffu8, 0];
        let mut m = ptr::null_mut();
        assert_eq!(oq_radical_pair_from_json(bytes.as_ptr().cast(), &mut m), OqStatus::Utf8);
    }
}

#[test]
fn errors_are_thread_local() {
    unsafe {
        oq_density_purity(ptr::null(), ptr::null_mut());
    }
    let other = std::thread::spawn(|| oq_last_error_message().is_null()).join().unwrap();
    assert!(other);
    assert!(!oq_last_error_message().is_null());
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(oq_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/openq.h");
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn header_declares_the_abi() {
    let h = header();
    for item in [
        "typedef struct OqDensity OqDensity;",
        "typedef struct OqRadicalPair OqRadicalPair;",
        "OQ_STATUS_OK = 0",
        "OQ_STATUS_IO = 4",
        "OqStatus oq_state_new(",
        "OqStatus oq_evolve_closed(",
        "OqStatus oq_decoherence_exponent(",
        "OqStatus oq_qec_fidelity_sweep(",
        "OqStatus oq_radical_pair_rf_scan(",
        "OqStatus oq_power(",
        "OqStatus oq_cli_run(",
        "void oq_radical_pair_free(",
        "const char *oq_last_error_message(void);",
    ] {
        assert!(h.contains(item), "header lacks {item}");
    }
}

/// Compiles and runs a C program against the generated header and the static
/// library from this build.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libopenq_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <math.h>
#include <stdio.h>
#include "openq.h"

int main(void) {
    double v = 0.0;
    if (oq_visibility_for_overlap(0.5, 0.0, 4096, &v) != OQ_STATUS_OK || fabs(v - 0.5) > 1e-6) return 1;
    OqRadicalPair *m = NULL;
    if (oq_radical_pair_from_json("{\"bogus\": 1}", &m) != OQ_STATUS_INVALID) return 2;
    if (oq_last_error_message() == NULL) return 3;
    if (oq_radical_pair_from_json("{}", &m) != OQ_STATUS_OK) return 4;
    OqYield y;
    if (oq_radical_pair_yield(m, 0.0, &y) != OQ_STATUS_OK) return 5;
    oq_radical_pair_free(m);
    printf("%.6f\n", y.singlet + y.triplet + y.surviving);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("smoke");
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "1.000000");
}
