//! End-to-end tests of the `isochrone` binary: exit-code contract,
//! deterministic byte-identical outputs, and the documented file formats.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isochrone"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn scan_csv_has_fixed_header_and_round_trips() {
    let out = run(&["scan", "--family", "harmonic", "--count", "10", "--nodes", "64"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("c,T,Tprime"));
    let mut rows = 0;
    for line in lines {
        if line.starts_with("scan ") {
            continue; // trailing summary
        }
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 3, "bad row {line}");
        let t: f64 = fields[1].parse().expect("parseable float");
        assert!((t - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        // 17 significant digits round-trip losslessly
        let reparsed: f64 = format!("{t:.16e}").parse().unwrap();
        assert_eq!(reparsed.to_bits(), t.to_bits());
        rows += 1;
    }
    assert_eq!(rows, 10);
}

#[test]
fn scan_is_deterministic_and_writes_manifest() {
    let dir = std::env::temp_dir().join("isochrone-cli-test-scan");
    std::fs::create_dir_all(&dir).unwrap();
    let path_a = dir.join("a.csv");
    let path_b = dir.join("b.csv");
    for (path, _) in [(&path_a, 0), (&path_b, 1)] {
        let out = run(&[
            "scan",
            "--family",
            "urabe:alpha=0.3",
            "--count",
            "8",
            "--nodes",
            "128",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let bytes_a = std::fs::read(&path_a).unwrap();
    let bytes_b = std::fs::read(&path_b).unwrap();
    assert_eq!(bytes_a, bytes_b, "identical invocations must be byte-identical");

    let manifest_path = dir.join("a.csv.manifest.json");
    assert!(Path::new(&manifest_path).exists(), "manifest sidecar missing");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["command"], "scan");
    assert_eq!(manifest["family"], "urabe:alpha=0.3");
    assert_eq!(manifest["params"]["nodes"], "128");
}

#[test]
fn check_json_is_deterministic() {
    let a = run(&["check", "--family", "three:alpha=0.2,beta=0.5,gamma=1"]);
    let b = run(&["check", "--family", "three:alpha=0.2,beta=0.5,gamma=1"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
}

#[test]
fn check_exit_codes() {
    // isochronous: 0
    let out = run(&["check", "--family", "isotonic:alpha=1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(body["report"]["verdict"], "Isochronous");

    let out = run(&["check", "--family", "harmonic"]);
    assert_eq!(out.status.code(), Some(0));

    // monotone: 1
    let out = run(&["check", "--family", "series:a3=1"]);
    assert_eq!(out.status.code(), Some(1));
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(body["report"]["verdict"], "Decreasing");

    // inconclusive: 2 (asymmetric quartic force, both chain orientations fail)
    let out = run(&["check", "--family", "series:a4=1"]);
    assert_eq!(out.status.code(), Some(2));

    // parse error: 3
    let out = run(&["check", "--family", "urabe:alpha=oops"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn coeffs_odd_from_even_matches_published_value() {
    let out = run(&["coeffs", "--mode", "odd-from-even", "--a2", "1", "--check-paper-table"]);
    assert!(out.status.success());
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(body["odd"]["a3"], "10/9");
    assert_eq!(body["table_check"], "ok");
}

#[test]
fn coeffs_g_from_b_harmonic() {
    let out = run(&["coeffs", "--mode", "g-from-b", "--b0", "0", "--order", "8"]);
    assert!(out.status.success());
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let coeffs = body["g_coefficients"].as_array().unwrap();
    assert_eq!(coeffs[1], "1");
    for c in &coeffs[2..] {
        assert_eq!(c, "0");
    }
}

#[test]
fn coeffs_b_from_g_reports_mismatch() {
    let out = run(&["coeffs", "--mode", "b-from-g", "--series", "a2=0,a4=1"]);
    assert!(out.status.success());
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(body["mismatch"].is_object(), "expected a mismatch report: {body}");
}

#[test]
fn coeffs_rejects_malformed_rationals() {
    let out = run(&["coeffs", "--mode", "odd-from-even", "--a2", "1//3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn oracle_agrees_on_harmonic() {
    let out = run(&["oracle", "--family", "harmonic", "--c", "0.5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let json_part = text.split("\nT_quad = ").next().unwrap();
    let body: serde_json::Value = serde_json::from_str(json_part).unwrap();
    let t_quad = body["T_quadrature"].as_f64().unwrap();
    let t_sim = body["T_simulated"].as_f64().unwrap();
    assert!((t_quad - 2.0 * std::f64::consts::PI).abs() < 1e-10);
    assert!((t_sim - 2.0 * std::f64::consts::PI).abs() < 1e-8);
}

#[test]
fn abel_runs_on_both_kinds_of_wells() {
    for family in ["isotonic:alpha=1", "series:a3=1"] {
        let out = run(&["abel", "--family", family, "--c", "0.2,0.4", "--nodes", "96"]);
        assert!(out.status.success(), "{family}");
        let text = stdout(&out);
        assert_eq!(text.lines().count(), 2);
        for line in text.lines() {
            let diff: f64 = line
                .split("|diff| = ")
                .nth(1)
                .unwrap()
                .trim()
                .parse()
                .unwrap();
            assert!(diff < 1e-5, "{family}: {line}");
        }
    }
}

#[test]
fn family_eval_dumps_values() {
    let out = run(&[
        "family", "eval",
        "--family", "isotonic:alpha=1",
        "--x-min", "-0.5",
        "--x-max", "1",
        "--points", "4",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,G,g"));
    let last = text.lines().last().unwrap();
    let fields: Vec<f64> = last.split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(fields[0], 1.0);
    assert!((fields[1] - 9.0 / 32.0).abs() < 1e-14); // G(1) at alpha = 1
}

#[test]
fn eval_window_outside_domain_is_an_error() {
    let out = run(&[
        "family", "eval",
        "--family", "isotonic:alpha=1",
        "--x-min", "-2",
        "--x-max", "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("domain"));
}
