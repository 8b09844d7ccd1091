use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn witl(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_witl"))
        .args(args)
        .current_dir(dir)
        .env_remove("WITL_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

/// Data rows of a CSV artifact (comment lines and header skipped).
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn write(dir: &Path, name: &str, body: &str) {
    std::fs::write(dir.join(name), body).unwrap();
}

fn dsbs_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "dsbs.json", r#"{"alphabet_sizes": [2, 2], "pmf": [0.41, 0.09, 0.09, 0.41]}"#);
    dir
}

#[test]
fn gauss_c3_point_value() {
    let dir = tempfile::tempdir().unwrap();
    let o = witl(&["gauss", "--rho", "0.5", "c3", "--D", "0.25,0.25"], dir.path());
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["tool"], "witl");
    assert!(v["version"].is_string());
    assert_eq!(v["config"]["cmd"]["subcommand"], "gauss");
    assert_eq!(v["result"]["kind"], "point");
    assert_eq!(v["result"]["region"], "D10");
    let value = v["result"]["value"].as_f64().unwrap();
    assert!((value - 0.792481250360578).abs() < 1e-11);
}

#[test]
fn dsbs_grid_has_one_tagged_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let o = witl(&["dsbs", "--a1", "0.1", "grid", "--grid", "50"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# witl "));
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["D1", "D2", "region", "R_joint", "C3_low", "C3_high"]);
    assert_eq!(rows.len(), 2500);
    let tags = ["E10", "E11", "E2", "E3", "ZERO"];
    for r in &rows {
        assert!(tags.contains(&r[2].as_str()), "{r:?}");
        let (lo, hi): (f64, f64) = (r[4].parse().unwrap(), r[5].parse().unwrap());
        assert!(lo <= hi + 1e-12);
    }
}

#[test]
fn malformed_source_reports_location_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.json", "{\"alphabet_sizes\": [2, 2],\n \"pmf\": [0.5, 0.5 0.0, 0.0]}");
    let o = witl(&["ci", "--source", "bad.json", "--output", "out.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json:2:"), "{err}");
    assert!(!dir.path().join("out.json").exists());

    write(dir.path(), "sum.json", "{\"alphabet_sizes\": [2],\n  \"pmf\": [0.7, 0.7]}");
    let o = witl(&["rd", "--source", "sum.json", "--D", "0.1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sum.json:2:3"));
}

#[test]
fn invalid_parameters_are_input_errors() {
    let dir = dsbs_dir();
    for args in [
        vec!["gauss", "--rho", "1.5", "c3", "--D", "0.1,0.1"],
        vec!["dsbs", "--a1", "0.1", "c3", "--D", "0.1"],
        vec!["rd", "--source", "dsbs.json", "--D", "-0.1,0.1"],
        vec!["ci", "--source", "dsbs.json", "--format", "csv"],
        vec!["--threads", "0", "dsbs", "--a1", "0.1", "ci"],
        vec!["synth", "--source", "dsbs.json", "--R0", "1", "--n", "4..2"],
    ] {
        let o = witl(&args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn synthesis_budget_exhaustion() {
    let dir = dsbs_dir();
    let o = witl(&["synth", "--source", "dsbs.json", "--R0", "1", "--n", "12", "--output", "s.csv"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(!dir.path().join("s.csv").exists());
}

#[test]
fn synthesis_table_and_solution_round_trip() {
    let dir = dsbs_dir();
    let ci = witl(&["ci", "--source", "dsbs.json", "--card", "2", "--output", "sol.json"], dir.path());
    assert!(ci.status.success());
    let args = ["--R0", "0.9", "--n", "1..3", "--seeds", "2"];
    let from_source = witl(&[&["synth", "--source", "dsbs.json", "--card", "2"][..], &args].concat(), dir.path());
    let from_solution = witl(&[&["synth", "--source", "dsbs.json", "--solution", "sol.json"][..], &args].concat(), dir.path());
    assert!(from_source.status.success() && from_solution.status.success());
    let (header, a) = csv_rows(&stdout(&from_source));
    let (_, b) = csv_rows(&stdout(&from_solution));
    assert_eq!(header, ["n", "M", "seed", "delta"]);
    assert_eq!(a.len(), 6);
    for (ra, rb) in a.iter().zip(&b) {
        assert_eq!(ra[..3], rb[..3]);
        let (da, db): (f64, f64) = (ra[3].parse().unwrap(), rb[3].parse().unwrap());
        assert!(da >= 0.0 && (da - db).abs() < 1e-9, "{ra:?} {rb:?}");
    }
}

#[test]
fn thread_cap_does_not_change_results() {
    let dir = dsbs_dir();
    let args = ["synth", "--source", "dsbs.json", "--card", "2", "--R0", "0.9", "--n", "2..4", "--seeds", "2"];
    let default = witl(&args, dir.path());
    let capped = Command::new(env!("CARGO_BIN_EXE_witl"))
        .args(args)
        .current_dir(dir.path())
        .env("WITL_THREADS", "1")
        .output()
        .unwrap();
    assert!(default.status.success() && capped.status.success());
    let body = |o: &Output| stdout(o).lines().filter(|l| !l.starts_with("# config")).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&default), body(&capped));
    assert!(stdout(&capped).contains("\"threads\":1"));
}

#[test]
fn rd_queries_and_sweep() {
    let dir = dsbs_dir();
    write(dir.path(), "x.json", r#"{"alphabet_sizes": [2], "pmf": [0.5, 0.5]}"#);
    let o = witl(&["rd", "--source", "x.json", "--D", "0.1"], dir.path());
    assert!(o.status.success());
    let rate = json(&o)["result"]["rate"].as_f64().unwrap();
    assert!((rate - 0.531004406410719).abs() < 1e-6);

    write(dir.path(), "ham.json", r#""hamming""#);
    let o = witl(&["rd", "--source", "dsbs.json", "--dist", "ham.json", "--D", "0.05,0.05"], dir.path());
    let rate = json(&o)["result"]["rate"].as_f64().unwrap();
    assert!((rate - 1.107283131496368).abs() < 1e-5);

    let o = witl(&["rd", "--source", "x.json", "--multipliers", "0.5,1,2,4"], dir.path());
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["lambda1", "D1", "rate"]);
    assert_eq!(rows.len(), 4);
}

#[test]
fn membership_with_rates_file() {
    let dir = dsbs_dir();
    // (C, h(a1) - h(D), h(a1) - h(D)) at D = 0.05
    write(dir.path(), "rates.json", r#"{"R0": 0.7421, "privates": [0.1826, 0.1826]}"#);
    let o = witl(&["member", "--source", "dsbs.json", "--rates", "rates.json", "--D", "0.05,0.05"], dir.path());
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["result"]["one_sided"], true);
    assert!(v["result"]["witness"].is_object());

    write(dir.path(), "zero.json", r#"{"R0": 0, "privates": [0, 0]}"#);
    let o = witl(&["member", "--source", "dsbs.json", "--rates", "zero.json", "--D", "0,0"], dir.path());
    assert!(json(&o)["result"]["witness"].is_null());
}

#[test]
fn c3_both_characterizations() {
    let dir = dsbs_dir();
    let o = witl(&["c3", "--source", "dsbs.json", "--D", "0.3,0.3"], dir.path());
    assert!(o.status.success());
    let v = json(&o);
    for key in ["tilde", "star"] {
        let upper = v["result"][key]["value_upper"].as_f64().unwrap();
        assert!((upper - 0.146943790910072).abs() < 2e-2, "{key}: {upper}");
    }
}

#[test]
fn audits_emit_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = witl(&["audit", "--suite", "t9"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["result"]["suite"], "t9");
    let checks = v["result"]["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["verdict"] == "skipped"));
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);

    let o = witl(&["audit", "--suite", "lemma1", "--count", "4", "--seed", "9"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let again = witl(&["audit", "--suite", "lemma1", "--count", "4", "--seed", "9"], dir.path());
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn closed_form_queries() {
    let dir = tempfile::tempdir().unwrap();
    let o = witl(&["dsbs", "--a0", "0.18", "ci"], dir.path());
    let v = json(&o)["result"]["value"].as_f64().unwrap();
    assert!((v - 0.742085858549717).abs() < 1e-11);
    let o = witl(&["dsbs", "--a1", "0.1", "ci", "--n", "3"], dir.path());
    let v = json(&o)["result"]["value"].as_f64().unwrap();
    assert!((v - 0.862417730635044).abs() < 1e-11);
    let o = witl(&["dsbs", "--a1", "0.1", "c3", "--D", "0.12,0.05"], dir.path());
    assert_eq!(json(&o)["result"]["kind"], "bracket");
    let o = witl(&["gauss", "--rho", "0.5", "alloc", "--Dp", "0.5,0.5", "--D", "0.25,0.25"], dir.path());
    let r = &json(&o)["result"];
    assert!((r["sum"].as_f64().unwrap() - r["joint_rate"].as_f64().unwrap()).abs() < 1e-11);
}
