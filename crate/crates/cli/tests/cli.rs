use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const FAST: &[&str] = &["--samples", "500", "--oracle-samples", "2000", "--oracle-refine", "20", "--trace-samples", "200"];

fn qfisher(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfisher"))
        .args(args)
        .env_remove("QFISHER_TOL_PSD")
        .env_remove("QFISHER_TOL_INTERIOR")
        .env_remove("QFISHER_RATIO_TOL")
        .output()
        .expect("binary runs")
}

fn with_fast<'a>(args: &[&'a str]) -> Vec<&'a str> {
    args.iter().chain(FAST).copied().collect()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn certify_exit_codes() {
    let out = qfisher(&with_fast(&["certify", "--map", "catalog:depolarizing?p=0.5"]));
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["payload"]["classification"], "CPTP");
    assert_eq!(r["tool"], "qfisher");
    assert!(r["wall_clock_ms"].is_u64());

    let out = qfisher(&with_fast(&["certify", "--map", "catalog:depolarizing?p=1.5"]));
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert_eq!(r["payload"]["classification"], "NonPositive");
    let search = &r["payload"]["base"]["search"];
    assert!(!search["witnesses"].as_array().unwrap().is_empty());
    assert_eq!(search["witnesses"][0]["rho"].as_array().unwrap().len(), 2);

    let out = qfisher(&with_fast(&["certify", "--map", "catalog:scalar?c=1.2"]));
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["payload"]["classification"], "TraceIncreasing");

    let out = qfisher(&with_fast(&["certify", "--map", "catalog:transpose"]));
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["payload"]["classification"], "PTP-not-CP");
}

#[test]
fn non_hermitian_preserving_map_is_an_error_exit() {
    let dir = tempfile::tempdir().unwrap();
    let transfer = r#"{"dim": 2, "repr": "transfer", "data": [
        [[1,0],[0,0],[0,0],[0,0]],
        [[0,0.3],[1,0],[0,0],[0,0]],
        [[0,0],[0,0],[1,0],[0,0]],
        [[0,0],[0,0],[0,0],[1,0]]]}"#;
    let path = write(dir.path(), "nhp.json", transfer);
    let out = qfisher(&with_fast(&["certify", "--map", &path]));
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["payload"]["classification"], "NotHP");
    assert!(String::from_utf8_lossy(&out.stderr).contains("Hermitian"));
}

#[test]
fn malformed_file_reports_json_pointer() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "bad.json",
        r#"{"dim": 2, "repr": "kraus", "data": [[[[1,0],[0,0]],[[0,0],[1]]]]}"#,
    );
    let out = qfisher(&["certify", "--map", &path]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("/data/0/1/1"), "{err}");
}

#[test]
fn metric_and_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let rho = write(dir.path(), "rho.json", "[[[0.7,0],[0,0]],[[0,0],[0.3,0]]]");
    let pure = write(dir.path(), "pure.json", "[[[1,0],[0,0]],[[0,0],[0,0]]]");
    let a = write(dir.path(), "a.json", "[[[1,0],[0,0]],[[0,0],[-1,0]]]");

    // Diagonal basepoint and tangent: the classical Fisher value 1/0.7 + 1/0.3.
    let out = qfisher(&["metric", "--rho", &rho, "--a", &a, "--f", "wy"]);
    assert_eq!(out.status.code(), Some(0));
    let p = &json(&out)["payload"];
    assert!((p["value"].as_f64().unwrap() - (1.0 / 0.7 + 1.0 / 0.3)).abs() < 1e-12);
    assert_eq!(p["f_or_g"], "wy");
    assert!((p["basepoint_mineig"].as_f64().unwrap() - 0.3).abs() < 1e-15);

    let out = qfisher(&["metric", "--rho", &pure, "--a", &a]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("interior"));

    let out = qfisher(&["divergence", "--rho", &rho, "--sigma", &rho, "--g", "neglog"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["payload"]["value"].as_f64().unwrap().abs() < 1e-15);

    let out = qfisher(&["metric", "--rho", &rho, "--a", &a, "--f", "nope"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sld, kmb, wy"));
}

#[test]
fn sweep_phase_structure() {
    let out = qfisher(&with_fast(&[
        "sweep", "--family", "depolarizing", "--param", "p", "--grid", "-1.2,-0.7,0,0.5,1.2",
    ]));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("value,map,classification,oracle,agrees"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let classes: Vec<&str> = rows.iter().map(|r| r[2]).collect();
    assert_eq!(classes, ["NonPositive", "PTP-not-CP", "CPTP", "CPTP", "NonPositive"]);
    assert!(rows.iter().all(|r| r[4] == "true"));

    let out = qfisher(&with_fast(&["sweep", "--family", "depolarizing", "--param", "p", "--grid", ""]));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
}

#[test]
fn single_point_sweep_matches_certify() {
    let out = qfisher(&with_fast(&[
        "sweep", "--family", "amplitude-damping", "--param", "gamma", "--grid", "0.3", "--format", "json",
    ]));
    let row = json(&out)["payload"][0].clone();
    let out = qfisher(&with_fast(&["certify", "--map", "catalog:amplitude-damping?gamma=0.3"]));
    let r = json(&out);
    assert_eq!(row["classification"], r["payload"]["classification"]);
    assert_eq!(row["base_max_ratio"], r["payload"]["base"]["sampled"]["max_ratio"]);
}

#[test]
fn reports_replay_bit_for_bit() {
    let args = with_fast(&["certify", "--map", "catalog:random-cptp?d=2&seed=4", "--f", "kmb"]);
    let a = json(&qfisher(&args));
    let b = json(&qfisher(&args));
    assert_eq!(a["payload"], b["payload"]);
    assert_eq!(a["config"], b["config"]);
}

#[test]
fn environment_overrides_tolerances() {
    let out = Command::new(env!("CARGO_BIN_EXE_qfisher"))
        .args(with_fast(&["contract-test", "--map", "catalog:identity"]))
        .env("QFISHER_RATIO_TOL", "0.25")
        .env("QFISHER_TOL_PSD", "1e-9")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["config"]["resolved"]["ratio_tol"], 0.25);
    assert_eq!(r["config"]["resolved"]["tol"]["psd"], 1e-9);

    // A loose threshold hides the 1.2 expansion.
    let out = Command::new(env!("CARGO_BIN_EXE_qfisher"))
        .args(with_fast(&["contract-test", "--map", "catalog:scalar?c=1.2"]))
        .env("QFISHER_RATIO_TOL", "0.25")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn witness_and_contract_test() {
    let out = qfisher(&with_fast(&["witness", "--map", "catalog:transpose", "--lift", "2"]));
    assert_eq!(out.status.code(), Some(2));
    let p = &json(&out)["payload"];
    assert!(p["strongest"]["ratio"].as_f64().unwrap() > 10.0);
    assert!(p["slope"].as_f64().unwrap() <= -0.8);

    let out = qfisher(&with_fast(&["witness", "--map", "catalog:depolarizing?p=0.5"]));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["payload"]["found"], false);

    let out = qfisher(&with_fast(&["witness", "--map", "catalog:depolarizing?p=1.5", "--contrast", "neglog"]));
    assert_eq!(out.status.code(), Some(2));

    let out = qfisher(&with_fast(&["contract-test", "--map", "catalog:random-cptp?d=3&seed=2", "--contrast", "neglog"]));
    assert_eq!(out.status.code(), Some(0));
    let out = qfisher(&with_fast(&["contract-test", "--map", "catalog:scalar?c=1.2"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classical_subcommand() {
    let out = qfisher(&with_fast(&["classical", "--map", "catalog:mixer?n=3"]));
    assert_eq!(out.status.code(), Some(0));
    let out = qfisher(&with_fast(&["classical", "--map", "catalog:negative-entry?n=3&value=-0.1"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["payload"]["boundary"]["witness"].is_object());
    let out = qfisher(&with_fast(&["classical", "--map", "catalog:identity"]));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn catalog_emit_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfisher(&["catalog", "--emit", "catalog:amplitude-damping?gamma=0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let path = write(dir.path(), "ad.json", &String::from_utf8(out.stdout).unwrap());
    let report = dir.path().join("report.json");
    let report = report.to_str().unwrap();
    let out = qfisher(&with_fast(&["certify", "--map", &path, "--out", report]));
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(r["payload"]["classification"], "CPTP");
}

#[test]
fn help_documents_map_schema() {
    let out = qfisher(&["--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for word in ["\"repr\": \"kraus\"", "transfer", "choi", "stochastic", "QFISHER_TOL_PSD", "Exit status"] {
        assert!(text.contains(word), "{word}");
    }
}
