use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn ptassign(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptassign")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn rows(p: &Path) -> Vec<String> {
    fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display())).lines().map(String::from).collect()
}

#[test]
fn validate_reports_counts() {
    let out = ptassign(&["validate", "--input", path(&fixture("congested"))]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("ok: 3 stops"), "{text}");
}

#[test]
fn validate_names_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    for f in fs::read_dir(fixture("minimal")).unwrap() {
        let f = f.unwrap().path();
        fs::copy(&f, dir.path().join(f.file_name().unwrap())).unwrap();
    }
    let st = dir.path().join("stop_times.csv");
    let text = fs::read_to_string(&st).unwrap().replace("T1,1,B,", "T1,1,Z,");
    fs::write(&st, text).unwrap();
    let out = ptassign(&["validate", "--input", path(dir.path())]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("stop_times.csv:3:"), "{err}");
    assert!(err.contains('Z'), "{err}");
}

#[test]
fn simulate_writes_reports() {
    let out_dir = tempfile::tempdir().unwrap();
    let out =
        ptassign(&["simulate", "--input", path(&fixture("minimal")), "--out", path(out_dir.path()), "--journeys"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = rows(&out_dir.path().join("day_report.csv"));
    assert_eq!(report.len(), 3);
    assert_eq!(report[0].split(',').count(), 19);
    assert!(report[0].starts_with("day,passengers,unfinished,total"));
    let loads = rows(&out_dir.path().join("arc_loads_day2.csv"));
    assert_eq!(loads.len(), 2);
    assert!(out_dir.path().join("journeys_day1.csv").exists());
}

#[test]
fn flags_override_config() {
    let out_dir = tempfile::tempdir().unwrap();
    let input = fixture("minimal");
    let args = [
        "simulate",
        "--input",
        path(&input),
        "--out",
        path(out_dir.path()),
        "--days",
        "1",
        "--seed",
        "9",
        "--threads",
        "1",
    ];
    let out = ptassign(&args);
    assert!(out.status.success());
    assert_eq!(rows(&out_dir.path().join("day_report.csv")).len(), 2);
}

#[test]
fn experiments_write_their_outputs() {
    let out_dir = tempfile::tempdir().unwrap();
    let input = fixture("congested");
    let out = ptassign(&["experiment-capacity", "--input", path(&input), "--out", path(out_dir.path()), "--days", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(rows(&out_dir.path().join("probe/day_report.csv")).len(), 2);
    assert_eq!(rows(&out_dir.path().join("raised/day_report.csv")).len(), 3);
    let raised = rows(&out_dir.path().join("raised_trips.txt"));
    assert!(!raised.is_empty() && raised.iter().any(|t| t.starts_with('F')), "{raised:?}");

    let out =
        ptassign(&["experiment-unlimited", "--input", path(&input), "--out", path(out_dir.path()), "--days", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let diff = rows(&out_dir.path().join("diff_loads.csv"));
    assert_eq!(diff[0], "trip,from_seq,to_seq,from_stop,to_stop,base_load,load,diff");
    assert!(out_dir.path().join("unlimited/arc_loads_day2.csv").exists());
}

#[test]
fn bad_config_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.txt");
    fs::write(&cfg, "days = 3\nepsilon = 2\n").unwrap();
    let out = ptassign(&[
        "simulate",
        "--input",
        path(&fixture("minimal")),
        "--config",
        path(&cfg),
        "--out",
        path(dir.path()),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));
}
