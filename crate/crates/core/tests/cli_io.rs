//! End-to-end checks of the CLI surface and artifact contracts.

use std::fs;
use std::path::Path;
use std::process::Command;

use qdnls_core::config::parse_config;
use qdnls_core::io::{read_snapshot, Snapshot};
use qdnls_core::run::{run, Outcome};

fn qdnls() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qdnls"))
}

fn simulate_config(out_dir: &Path, seed: u64) -> String {
    format!(
        r#"{{
        "command": "simulate",
        "params": {{"alpha": -1.0, "beta": 1.0, "gamma": 1.0, "d": 1}},
        "grid": {{"n": 64, "period": 62.83185307179586}},
        "solver": {{"dt": 0.01, "t_end": 0.1, "monitor_every": 5}},
        "experiment": {{"simulate": {{"initial": {{"kind": "random_band", "band": 2.0, "amplitude": 0.05}}, "snapshot_times": [0.1]}}}},
        "seed": {seed},
        "out_dir": "{}"
    }}"#,
        out_dir.display()
    )
}

#[test]
fn simulate_artifacts_and_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let out1 = tmp.path().join("run1");

    // identical config (including out_dir) run twice: byte-identical CSVs
    let cfg = parse_config(&simulate_config(&out1, 42)).unwrap();
    assert_eq!(run(&cfg).unwrap(), Outcome::Ok);
    let csv1 = fs::read(out1.join("diagnostics.csv")).unwrap();
    assert_eq!(run(&cfg).unwrap(), Outcome::Ok);
    let csv2 = fs::read(out1.join("diagnostics.csv")).unwrap();

    for name in ["config.echo", "diagnostics.csv", "report.txt"] {
        assert!(out1.join(name).exists(), "{name} missing");
    }
    assert_eq!(csv1, csv2);

    // header row and fingerprint footer
    let text = String::from_utf8(csv1).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "t,mass,energy,grad_u,grad_v,grad_w,F,hs_0,hs_sc,hs_half,hs_1,gn_ratio"
    );
    assert!(lines.last().unwrap().starts_with("# fingerprint="));
    let fp_len = lines.last().unwrap().trim_start_matches("# fingerprint=").len();
    assert_eq!(fp_len, 64);

    // a state snapshot exists and decodes
    let snap = fs::read_dir(&out1)
        .unwrap()
        .filter_map(|e| e.ok())
        .find(|e| e.file_name().to_string_lossy().ends_with(".qdnls"))
        .expect("snapshot written");
    match read_snapshot(&snap.path()).unwrap() {
        Snapshot::State(state) => {
            assert_eq!(state.grid().n, 64);
        }
        Snapshot::Field(_) => panic!("expected a state snapshot"),
    }

    // the echoed config re-parses to the same canonical form
    let echo = fs::read_to_string(out1.join("config.echo")).unwrap();
    let cfg2 = parse_config(&echo).unwrap();
    assert_eq!(echo, cfg2.canonical_json());
}

#[test]
fn cli_resonance_reports_regime() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("res");
    let status = qdnls()
        .args([
            "resonance",
            "--alpha",
            "2",
            "--beta",
            "1",
            "--gamma",
            "1",
            "--dim",
            "1",
            "--scan",
            "separated",
            "--scan-extent",
            "8",
            "--scan-step",
            "0.5",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("theta = -3"), "{report}");
    assert!(report.contains("T1.4(iii)"), "{report}");
    let machine = fs::read_to_string(out.join("resonance.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&machine).unwrap();
    assert_eq!(v["resonance"]["theta"], serde_json::json!(-3.0));
    assert!(v["scan"]["min_ratio"].as_f64().unwrap() > 0.0);
}

#[test]
fn cli_rejects_zero_alpha_with_exit_2() {
    let out = qdnls()
        .args(["resonance", "--alpha", "0", "--beta", "1", "--gamma", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("params.alpha"), "{stderr}");
}

#[test]
fn cli_illposed_regime_gate_exits_2_before_compute() {
    // case c demands theta < 0; (-1, 1, 1) has theta = 3
    let out = qdnls()
        .args([
            "illposed", "--case", "c", "--s", "0.25", "--params=-1,1,1", "--n-min", "16",
            "--n-max", "512",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("illposed.case"), "{stderr}");
}

#[test]
fn cli_illposed_case_a_small_ladder() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("ill");
    let status = qdnls()
        .args([
            "illposed",
            "--case",
            "a",
            "--s",
            "0.5",
            "--n-min",
            "16",
            "--n-max",
            "256",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("illposed.csv")).unwrap();
    assert!(csv.starts_with("N,R\n"));
    assert_eq!(csv.lines().count(), 1 + 5 + 1); // header + ladder + fingerprint
    let fit: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("fit.json")).unwrap()).unwrap();
    let slope = fit["slope"].as_f64().unwrap();
    assert!((slope - 0.5).abs() < 0.1, "slope {slope}");
}

#[test]
fn cli_bilinear_requires_seed() {
    let out = qdnls()
        .args(["bilinear", "--l", "2", "--h-list", "8,16", "--trials", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("seed"), "{stderr}");
}

#[test]
fn cli_bilinear_writes_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("bil");
    let status = qdnls()
        .args([
            "bilinear",
            "--l",
            "2",
            "--h-list",
            "16,32",
            "--trials",
            "3",
            "--seed",
            "5",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("bilinear.csv")).unwrap();
    assert!(csv.starts_with("H,sup_ratio\n"));
}

#[test]
fn blowup_exits_3_with_partial_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("blow");
    let cfg_text = format!(
        r#"{{
        "command": "simulate",
        "params": {{"alpha": 1.0, "beta": 1.0, "gamma": 1.0, "d": 1}},
        "grid": {{"n": 64, "period": 6.283185307179586}},
        "solver": {{"dt": 0.05, "t_end": 50.0, "monitor_every": 1}},
        "experiment": {{"simulate": {{"initial": {{"kind": "random_band", "band": 8.0, "amplitude": 2000.0}}}}}},
        "seed": 1,
        "out_dir": "{}"
    }}"#,
        out.display()
    );
    let cfg_path = tmp.path().join("blow.json");
    fs::write(&cfg_path, cfg_text).unwrap();
    let output = qdnls()
        .args(["simulate", "--config", cfg_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    assert!(out.join("diagnostics.csv").exists());
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("BLOW-UP"), "{report}");
}

#[test]
fn verify_command_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("verify");
    let output = qdnls().args(["verify", "--out", out.to_str().unwrap()]).output().unwrap();
    assert!(output.status.success());
    let text = fs::read_to_string(out.join("verify.txt")).unwrap();
    assert!(text.lines().all(|l| l.is_empty() || l.starts_with("PASS")), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
}

#[test]
fn unknown_config_key_is_fatal() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("x");
    let mut text = simulate_config(&out, 1);
    text = text.replace("\"seed\":", "\"typo\": 1, \"seed\":");
    let cfg_path = tmp.path().join("bad.json");
    fs::write(&cfg_path, text).unwrap();
    let output = qdnls()
        .args(["simulate", "--config", cfg_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}
