use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::ptr;

use qerase_ffi::*;

fn fixture(name: &str) -> CString {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

fn load(name: &str) -> *mut QeState {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { qe_state_from_json(fixture(name).as_ptr(), &mut s) }, QeStatus::Ok);
    s
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(qe_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn state_round_trip_and_entropy() {
    let s = load("werner_0.5.json");
    let mut dim = 0;
    assert_eq!(unsafe { qe_state_dim(s, &mut dim) }, QeStatus::Ok);
    assert_eq!(dim, 4);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { qe_state_to_json(s, &mut json) }, QeStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { qe_state_from_json(json, &mut back) }, QeStatus::Ok);
    let (mut a, mut b) = (0.0, 0.0);
    unsafe {
        qe_state_entropy(s, &mut a);
        qe_state_entropy(back, &mut b);
        qe_string_free(json);
        qe_state_free(s);
        qe_state_free(back);
    }
    assert_eq!(a.to_bits(), b.to_bits());
}

#[test]
fn discord_through_the_abi() {
    let s = load("bell.json");
    let mut cfg = QeOptimizerConfig { grid_resolution: 0, refinement_iterations: 0, random_restarts: 0, seed: 0, convergence_tol: 0.0 };
    assert_eq!(unsafe { qe_optimizer_default(&mut cfg) }, QeStatus::Ok);
    assert_eq!(cfg.grid_resolution, 64);
    let side = CString::new("B").unwrap();
    let mut out = QeCorrelations::default();
    assert_eq!(unsafe { qe_discord(s, side.as_ptr(), &cfg, &mut out) }, QeStatus::Ok);
    assert!((out.discord - 1.0).abs() < 1e-5);
    assert_eq!(unsafe { qe_discord(s, side.as_ptr(), ptr::null(), &mut out) }, QeStatus::Ok);
    let bad = CString::new("Z").unwrap();
    assert_eq!(unsafe { qe_discord(s, bad.as_ptr(), ptr::null(), &mut out) }, QeStatus::InvalidParameter);
    assert!(last_error().contains('Z'));
    cfg.grid_resolution = 1;
    assert_eq!(unsafe { qe_discord(s, side.as_ptr(), &cfg, &mut out) }, QeStatus::InvalidParameter);
    unsafe { qe_state_free(s) };
}

#[test]
fn errors_are_reported_not_unwound() {
    let mut s = ptr::null_mut();
    let junk = CString::new("{\"dims\": [2]").unwrap();
    assert_eq!(unsafe { qe_state_from_json(junk.as_ptr(), &mut s) }, QeStatus::Parse);
    assert!(s.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { qe_state_from_json(ptr::null(), &mut s) }, QeStatus::NullPointer);
    let mut e = 0.0;
    assert_eq!(unsafe { qe_state_entropy(ptr::null(), &mut e) }, QeStatus::NullPointer);
    unsafe {
        qe_state_free(ptr::null_mut());
        qe_channel_free(ptr::null_mut());
        qe_string_free(ptr::null_mut());
    }
    assert!(!unsafe { CStr::from_ptr(qe_version()) }.to_bytes().is_empty());
}

#[test]
fn local_channel_and_scenario() {
    let bell = load("bell.json");
    let ch_json = CString::new(r#"{"kraus": [[[[1,0],[0,0]],[[0,0],[0,0]]], [[[0,0],[0,0]],[[0,0],[1,0]]]]}"#).unwrap();
    let mut ch = ptr::null_mut();
    assert_eq!(unsafe { qe_channel_from_json(ch_json.as_ptr(), &mut ch) }, QeStatus::Ok);
    let side = CString::new("B").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { qe_apply_local_channel(ch, bell, side.as_ptr(), &mut out) }, QeStatus::Ok);
    let mut c = QeCorrelations::default();
    assert_eq!(unsafe { qe_discord(out, side.as_ptr(), ptr::null(), &mut c) }, QeStatus::Ok);
    assert!(c.discord <= c.optimizer_slack);
    assert!((c.mutual_information - 1.0).abs() < 1e-12);

    let name = CString::new("bleach").unwrap();
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { qe_run_scenario(name.as_ptr(), bell, ptr::null(), &mut report) }, QeStatus::Ok);
    let text = unsafe { CStr::from_ptr(report) }.to_str().unwrap().to_owned();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!((v["ledger"]["delta_d"].as_f64().unwrap() - 1.0).abs() < 2e-5);
    unsafe { qe_string_free(report) };

    let thermal = CString::new("thermalize").unwrap();
    let params = CString::new(r#"{"beta": -1}"#).unwrap();
    assert_eq!(unsafe { qe_run_scenario(thermal.as_ptr(), bell, params.as_ptr(), &mut report) }, QeStatus::InvalidParameter);
    let params = CString::new(r#"{"beta": 0.5, "unknown": 1}"#).unwrap();
    assert_eq!(unsafe { qe_run_scenario(thermal.as_ptr(), bell, params.as_ptr(), &mut report) }, QeStatus::Parse);
    unsafe {
        qe_channel_free(ch);
        qe_state_free(out);
        qe_state_free(bell);
    }
}

#[test]
fn montecarlo_summary() {
    let mut s = QeMonteCarloSummary::default();
    assert_eq!(unsafe { qe_montecarlo(7, 2, 2, 4, 4, 20, false, ptr::null(), &mut s) }, QeStatus::Ok);
    assert_eq!(s.trials, 20);
    assert_eq!(s.total_violations, 0);
    assert_eq!(unsafe { qe_montecarlo(7, 2, 2, 4, 4, 20, true, ptr::null(), &mut s) }, QeStatus::Ok);
    assert_eq!(s.creation_evaluated, 20);
    assert_eq!(unsafe { qe_montecarlo(7, 2, 7, 4, 4, 1, false, ptr::null(), &mut s) }, QeStatus::UnsupportedDimension);
    assert_eq!(unsafe { qe_montecarlo(7, 2, 2, 4, 9, 1, false, ptr::null(), &mut s) }, QeStatus::InvalidParameter);
}
