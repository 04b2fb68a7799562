use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn domain(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/domains").join(name)
}

fn jsgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jsgraph")).args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf8 path")
}

fn files_in(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .expect("dir")
        .map(|e| e.expect("entry").file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn check_passes_scherk_with_equal_blow_up_lengths() {
    let out = jsgraph(&["check", "--domain", path_str(&domain("scherk.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).expect("json");
    assert_eq!(report["verdict"], "pass");
    assert_eq!(report["global"]["alpha_boundary"], report["global"]["beta_boundary"]);
}

#[test]
fn failing_check_exits_one_with_certificate() {
    let out = jsgraph(&["check", "--domain", path_str(&domain("two_a_square.json")), "--mode", "translating"]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).expect("json");
    assert_eq!(report["verdict"], "fail");
    assert_eq!(report["certificate"]["subject"], "boundary");
}

#[test]
fn malformed_domain_reports_position_and_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"name\": ,\n}").unwrap();
    let out = jsgraph(&["check", "--domain", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("\"line\": 2"), "{err}");
    let out = jsgraph(&["check", "--domain", path_str(&dir.path().join("missing.json"))]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn js_requires_override_for_failing_domain() {
    let dir = tempfile::tempdir().unwrap();
    let d = domain("two_a_square.json");
    let base = ["js", "--domain", path_str(&d), "--mode", "translating", "--caps", "1,2", "--h", "0.2"];
    let out = jsgraph(&[&base[..], &["--out", path_str(dir.path())]].concat());
    assert_eq!(out.status.code(), Some(1));
    let out = jsgraph(&[&base[..], &["--out", path_str(dir.path()), "--override-check"]].concat());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["continuation"]["check_overridden"], true);
}

#[test]
fn js_is_deterministic_and_confined_to_out() {
    let root = tempfile::tempdir().unwrap();
    let d = domain("one_a_square.json");
    let run = |name: &str| {
        let out_dir = root.path().join(name);
        let out = jsgraph(&[
            "js", "--domain", path_str(&d), "--mode", "translating", "--caps", "1,2,4", "--h", "0.2", "--seed", "3", "--out",
            path_str(&out_dir),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        (std::fs::read(out_dir.join("report.json")).unwrap(), out.stdout)
    };
    let (a, sa) = run("a");
    let (b, sb) = run("b");
    assert_eq!(a, b);
    assert_eq!(sa, sb);
    assert_eq!(files_in(root.path()), vec!["a", "b"]);
    let report: Value = serde_json::from_slice(&a).unwrap();
    for cap in report["continuation"]["caps"].as_array().unwrap() {
        assert_eq!(cap["monotone_violations"], 0);
    }
}

#[test]
fn solve_then_analyze_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = domain("grim_reaper_strip.json");
    let out = jsgraph(&["solve", "--domain", path_str(&d), "--mode", "translating", "--h", "0.2", "--out", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(files_in(dir.path()), vec!["mesh.jsmesh", "solution.csv", "solution.json"]);
    let out = jsgraph(&[
        "analyze",
        "--domain",
        path_str(&d),
        "--mode",
        "translating",
        "--mesh",
        path_str(&dir.path().join("mesh.jsmesh")),
        "--solution",
        path_str(&dir.path().join("solution.csv")),
        "--trials",
        "5",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&std::fs::read(dir.path().join("analysis.json")).unwrap()).unwrap();
    assert!(report["weighted_area"]["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn oracle_table_satisfies_identity() {
    let out = jsgraph(&["oracle", "--format", "csv", "--h", "1e-3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "abs_error").unwrap();
    let mut rows = 0;
    for line in lines {
        let err: f64 = line.split(',').nth(col).unwrap().parse().unwrap();
        assert!(err <= 1e-5, "{line}");
        rows += 1;
    }
    assert!(rows > 0);
}
