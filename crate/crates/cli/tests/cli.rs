use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn coha(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coha"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn quiver(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "quivers", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

#[test]
fn genus0_check_passes() {
    let out = coha(&["check", "genus0", "--rmax", "6"]);
    assert!(out.status.success());
    let rep = json(&out);
    assert_eq!(rep["pass"], true);
    assert!(rep.get("witness").is_none());
    assert_eq!(rep["params"]["r_max"], 6);
}

#[test]
fn echeck_writes_report() {
    let path = std::env::temp_dir().join(format!("coha-echeck-{}.json", std::process::id()));
    let p = path.to_string_lossy().into_owned();
    let out = coha(&[
        "check", "echeck", "--genus", "2", "--rmax", "2", "--qmax", "40", "--report", &p,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(saved, json(&out));
    assert!(saved["timings"]["total"].as_f64().is_some());
}

#[test]
fn corruption_exits_one_with_witness() {
    let out = coha(&[
        "check",
        "genus1",
        "--genus",
        "1",
        "--rmax",
        "2",
        "--corrupt",
        "character-sign-flip",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let rep = json(&out);
    assert_eq!(rep["pass"], false);
    assert_eq!(rep["witness"]["t_degree"], 2);
}

#[test]
fn bad_input_fails_without_report() {
    let out = coha(&["check", "psws", "--genus", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("genus"));
    assert!(!coha(&["check", "nonsense"]).status.success());
    assert!(
        !coha(&["kac", "--quiver", &quiver("jordan.q"), "--dim", "x"])
            .status
            .success()
    );
}

#[test]
fn kac_from_files() {
    for (file, dim, want) in [
        ("jordan.q", "2", "q"),
        ("loops2.q", "1", "q^2"),
        ("a2.q", "1,1", "1"),
        ("kronecker.q", "1,1", "q + 1"),
    ] {
        let out = coha(&["kac", "--quiver", &quiver(file), "--dim", dim]);
        assert!(out.status.success(), "{file}");
        assert_eq!(json(&out)["kac"], want, "{file}");
    }
}

#[test]
fn count_csv_agrees_with_enumeration() {
    let out = coha(&[
        "count", "--genus", "2", "--rank", "2", "--at", "2,3", "--brute", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows, ["q,count,enumerated", "2,486,486", "3,335616,335616"]);
}

#[test]
fn extract_bps_genus1_is_torus() {
    let out = coha(&[
        "extract", "bps", "--genus", "1", "--rmax", "2", "--qmin", "-3", "--qmax", "3",
    ]);
    assert!(out.status.success());
    let terms = json(&out)["terms"].clone();
    let want: Value = serde_json::json!([
        [1, -2, 1],
        [1, 0, -2],
        [1, 2, 1],
        [2, -2, 1],
        [2, 0, -2],
        [2, 2, 1]
    ]);
    assert_eq!(terms, want);
}

#[test]
fn series_roundtrips_through_extract() {
    let out = coha(&[
        "series", "stack", "--genus", "0", "--rmax", "3", "--qmin", "0", "--qmax", "8",
    ]);
    assert!(out.status.success());
    let path = std::env::temp_dir().join(format!("coha-stack-{}.json", std::process::id()));
    std::fs::write(&path, &out.stdout).unwrap();
    let bps = coha(&["extract", "bps", "--input", &path.to_string_lossy()]);
    std::fs::remove_file(&path).ok();
    assert!(bps.status.success());
    assert_eq!(json(&bps)["terms"], serde_json::json!([[1, 0, 1]]));
}
