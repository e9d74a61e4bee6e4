//! Command-line interface contracts: exit codes, formats, and the
//! catalog export/import round trip.

use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_openribbon")
}

#[test]
fn usage_errors_exit_2() {
    let out = Command::new(bin()).args(["enumerate", "1", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(bin()).args(["descendents", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn resource_cap_exits_3() {
    let out = Command::new(bin())
        .args(["--max-entries", "2", "enumerate", "0", "5", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn amplitude_text_output() {
    let out = Command::new(bin()).args(["amplitude", "1", "0", "1"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("1/λ1^3"), "got: {text}");
}

#[test]
fn descendents_formats() {
    let out = Command::new(bin())
        .args(["descendents", "0", "1", "2", "--format", "csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("g,k,exponents,value"));
    assert!(text.contains("0,1,0 1,1"), "csv row: {text}");

    let out = Command::new(bin())
        .args(["descendents", "0", "1", "2", "--format", "json"])
        .output()
        .unwrap();
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 1);
}

#[test]
fn out_of_scope_signature_reports_cleanly() {
    let out = Command::new(bin()).args(["descendents", "0", "2", "1"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("out of theorem scope"));
}

#[test]
fn kasteleyn_report_is_json_lines() {
    let out = Command::new(bin()).args(["kasteleyn", "0", "3", "1"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = 0;
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["matches"].as_bool().unwrap());
        assert_eq!(v["classes"].as_u64().unwrap(), 1);
        lines += 1;
    }
    assert_eq!(lines, 2);
}

#[test]
fn verify_exit_codes() {
    let out = Command::new(bin())
        .args(["verify", "--suite", "catalan"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = Command::new(bin())
        .args(["verify", "--suite", "angular", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    serde_json::from_str::<serde_json::Value>(
        String::from_utf8(out.stdout).unwrap().split("}\n{").next().unwrap(),
    )
    .ok();
}

#[test]
fn catalog_export_import_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("catalog.jsonl");
    let out = Command::new(bin())
        .args(["catalog", "export", "0", "5", "1", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 24);
    let out = Command::new(bin())
        .args(["catalog", "import"])
        .arg(&path)
        .args(["0", "5", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let msg = String::from_utf8(out.stdout).unwrap();
    assert!(msg.contains("imported 24 graphs"), "got: {msg}");
}
