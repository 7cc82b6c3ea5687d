//! Exercises the C surface from Rust exactly as a foreign caller would.

use std::ffi::CString;
use std::os::raw::c_char;
use std::ptr;

use qdnls_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0u8; 256];
    let n = qdnls_last_error(buf.as_mut_ptr() as *mut c_char, buf.len());
    buf.truncate(n.min(255));
    String::from_utf8_lossy(&buf).into_owned()
}

#[test]
fn params_lifecycle_and_algebra() {
    let mut handle: *mut QdnlsParams = ptr::null_mut();
    let status = qdnls_params_new(2.0, 1.0, 1.0, 1, &mut handle);
    assert_eq!(status, QdnlsStatus::Ok);
    assert!(!handle.is_null());

    let mut theta = 0.0;
    assert_eq!(qdnls_theta(handle, &mut theta), QdnlsStatus::Ok);
    assert_eq!(theta, -3.0);

    let mut kappa = 0.0;
    assert_eq!(qdnls_kappa(handle, &mut kappa), QdnlsStatus::Ok);
    assert_eq!(kappa, 2.0); // (2-1)(2-1)(1+1)

    let mut res = QdnlsResonance {
        theta: 0.0,
        kappa: 0.0,
        acg_bc: 0.0,
        s_critical: 0.0,
        same_sign: 0,
        has_m_factor: 0,
        has_m_pair: 0,
        m_factor: 0.0,
        m_plus: 0.0,
        m_minus: 0.0,
    };
    assert_eq!(qdnls_resonance(handle, &mut res), QdnlsStatus::Ok);
    assert_eq!(res.theta, -3.0);
    assert_eq!(res.has_m_pair, 1);
    assert!((res.m_plus - (1.0 + 3f64.sqrt())).abs() < 1e-14);
    assert_eq!(res.same_sign, 1);
    assert_eq!(res.s_critical, -0.5);

    let mut buf = vec![0u8; 512];
    let mut written = 0usize;
    assert_eq!(
        qdnls_regime_labels(handle, buf.as_mut_ptr() as *mut c_char, buf.len(), &mut written),
        QdnlsStatus::Ok
    );
    let text = String::from_utf8_lossy(&buf[..written - 1]).into_owned();
    assert!(text.contains("T1.4(iii)"), "{text}");

    qdnls_params_free(handle);
}

#[test]
fn invalid_params_set_error() {
    let mut handle: *mut QdnlsParams = ptr::null_mut();
    let status = qdnls_params_new(0.0, 1.0, 1.0, 1, &mut handle);
    assert_eq!(status, QdnlsStatus::InvalidArgument);
    assert!(handle.is_null());
    assert!(last_error().contains("alpha"));

    assert_eq!(qdnls_theta(ptr::null(), &mut 0.0), QdnlsStatus::NullPointer);
}

#[test]
fn modulation_scan_over_ffi() {
    let mut out = 0.0;
    let status = qdnls_modulation_scan(
        1.0,
        1.0,
        1.0,
        1,
        QdnlsScanCondition::ThetaPositive,
        0.0,
        8,
        0.5,
        &mut out,
    );
    assert_eq!(status, QdnlsStatus::Ok);
    assert!(out >= 1.0);

    // hypothesis violation surfaces as an error with a message
    let status = qdnls_modulation_scan(
        1.0,
        -1.0,
        -1.0,
        1,
        QdnlsScanCondition::ThetaPositive,
        0.0,
        8,
        0.5,
        &mut out,
    );
    assert_eq!(status, QdnlsStatus::InvalidArgument);
    assert!(!last_error().is_empty());
}

#[test]
fn run_json_round_trip() {
    let dir = std::env::temp_dir().join(format!("qdnls_ffi_{}", std::process::id()));
    let cfg = format!(
        r#"{{
        "command": "resonance",
        "params": {{"alpha": -1.0, "beta": 1.0, "gamma": 1.0, "d": 2}},
        "grid": {{"n": 32, "period": 6.283185307179586}},
        "solver": {{"dt": 0.01, "t_end": 0.1}},
        "experiment": {{"resonance": {{}}}},
        "out_dir": "{}"
    }}"#,
        dir.display()
    );
    let c = CString::new(cfg).unwrap();
    assert_eq!(qdnls_run_json(c.as_ptr()), QdnlsStatus::Ok);
    assert!(dir.join("resonance.json").exists());
    assert!(dir.join("report.txt").exists());
    std::fs::remove_dir_all(&dir).ok();

    // config errors come back as ConfigError with a path-qualified message
    let bad = CString::new("{\"command\": \"simulate\"}").unwrap();
    assert_eq!(qdnls_run_json(bad.as_ptr()), QdnlsStatus::ConfigError);
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { std::ffi::CStr::from_ptr(qdnls_version()) };
    assert!(!v.to_str().unwrap().is_empty());
}
