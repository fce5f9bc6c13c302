use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bdvarmin")).args(args).current_dir(dir).output().unwrap()
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn solve_then_dual() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["solve", "--integrand", "quadratic", "--grid", "10x10", "--u0-gen", "bend", "--tol", "1e-12", "--out", "s"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = stdout_json(&o);
    assert!(rep["provenance"]["config_hash"].as_str().unwrap().len() == 64);
    for f in ["solution.csv", "stress.csv", "report.json"] {
        assert!(dir.path().join("s").join(f).exists());
    }
    let o = bin(&["dual", "--from-solution", "s/solution.csv", "--out", "d/gaps.csv"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(dir.path().join("d/gaps.csv")).unwrap();
    let mut lines = table.lines();
    let head: Vec<&str> = lines.next().unwrap().split(',').collect();
    let gi = head.iter().position(|c| *c == "gap").unwrap();
    let gap: f64 = lines.next().unwrap().split(',').nth(gi).unwrap().parse().unwrap();
    assert!(gap.abs() <= 1e-8, "{gap}");
}

#[test]
fn experiment_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("c.json"),
        r#"{"integrand": "area", "grid": "8x8", "u0": "shear", "schedule": {"j_values": [1, 2, 4]}, "diagnostics": ["sequence", "dual", "nogap"]}"#,
    )
    .unwrap();
    let a = bin(&["experiment", "--config", "c.json"], dir.path());
    let b = bin(&["experiment", "--config", "c.json"], dir.path());
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let line = String::from_utf8(a.stdout).unwrap();
    assert!(line.contains("failures=0") && line.contains("report_hash="), "{line}");
}

#[test]
fn bad_config_points_at_the_field() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"integrand": "area", "grid": "8x8", "u0": "shear", "schedule": {"j_values": [4, 4]}}"#).unwrap();
    let o = bin(&["experiment", "--config", "c.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schedule.j_values[1]"));
}

#[test]
fn spaces_corpus_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["spaces", "--op", "gagliardo", "--corpus", "9", "--out", "t.csv"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let mut lines = t.lines();
    assert_eq!(lines.next(), Some("field,resolution,op,params,value"));
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.split(',').next_back().unwrap().parse::<f64>().unwrap() > 0.0));
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["selftest"], dir.path());
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("[PASS]")).count(), 8);
}
