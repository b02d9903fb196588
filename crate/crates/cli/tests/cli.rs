use std::fs;
use std::process::{Command, Output};

fn cyclesim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclesim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn bounds_for_the_reference_ring() {
    let o = cyclesim(&["bounds", "--hops", "3", "--cycle-ns", "50000"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("d_min_ns          100000"), "{text}");
    assert!(text.contains("d_max_ns          200000"));
    assert!(text.contains("saturation_pi     16"));
}

#[test]
fn bounds_flag_cycle_length_links() {
    let o = cyclesim(&["bounds", "--hops", "3", "--cycle-ns", "50000", "--prop-ns", "50000"]);
    let text = stdout(&o);
    assert!(text.contains("conforming        no"), "{text}");
    assert!(text.contains("worst_case_ns     400000 (observed doubling)"));
}

#[test]
fn zero_hops_is_rejected() {
    assert!(!cyclesim(&["bounds", "--hops", "0", "--cycle-ns", "50000"]).status.success());
}

#[test]
fn defaults_round_trip_through_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = cyclesim(&["defaults"]);
    assert!(o.status.success());
    let defaults = stdout(&o);
    assert!(defaults.contains("\"cycle_time_ns\": 50000"));
    // shrink the default sweep to one short point
    let cfg = defaults
        .replace("\"sim_limit_ns\": 1000000000", "\"sim_limit_ns\": 2000000")
        .replace("\"warmup_ns\": 10000000", "\"warmup_ns\": 0");
    let cfg = cfg.replacen("\"pi\": {\n    \"from\": 1,\n    \"to\": 40\n  }", "\"pi\": 2", 1);
    let path = dir.path().join("cfg.json");
    fs::write(&path, cfg).unwrap();
    let out = dir.path().join("out.csv");
    let o = cyclesim(&["run", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn run_is_deterministic_and_honours_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(
        &path,
        r#"{"scheduler":"paternoster","pi":[4,33],"sim_limit_ns":5000000,"warmup_ns":0}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let a = cyclesim(&["run", "--config", p, "--parallel", "1"]);
    let b = cyclesim(&["run", "--config", p, "--parallel", "2"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 5);
    let c = cyclesim(&["run", "--config", p, "--seed", "9"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn bad_config_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\n  \"pi\": 4,\n  \"colour\": 1\n}").unwrap();
    let o = cyclesim(&["run", "--config", path.to_str().unwrap()]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn missing_config_fails() {
    let o = cyclesim(&["run", "--config", "/nonexistent/cfg.json"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/cfg.json"));
}
