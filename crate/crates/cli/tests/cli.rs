use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liggett-lab"))
        .args(args)
        .env_remove("LIGGETT_LAB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn prob_prints_exact_rational() {
    let o = run(&["color", "prob", "--q", "4", "--word", "121"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1/48");
    let f = run(&["color", "prob", "--q", "4", "--word", "121", "--source", "formula", "--json"]);
    assert_eq!(json(&f)["value"], "1/48");
}

#[test]
fn check_dep_expectations_set_exit_code() {
    let ok = run(&["color", "check-dep", "--q", "4", "--k", "1", "--nmax", "6", "--expect", "holds"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = run(&["color", "check-dep", "--q", "3", "--k", "1", "--nmax", "4", "--expect", "holds"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("check failed"));
    let fails = run(&["color", "check-dep", "--q", "3", "--k", "1", "--nmax", "4", "--expect", "fails", "--json"]);
    assert_eq!(fails.status.code(), Some(0));
    assert!(json(&fails)["witness"].is_object());
}

#[test]
fn gap_report_on_path() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "path3.g", "n 3\ne 0 1 1.0\ne 1 2 1.0\n");
    let o = run(&["gap", "report", "--graph", &g, "--expect", "identity", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let ip = v["lambdaIP"].as_f64().unwrap();
    let rw = v["lambdaRW"].as_f64().unwrap();
    assert!((ip - 1.0).abs() < 1e-8 && (rw - 1.0).abs() < 1e-8, "{ip} {rw}");
}

#[test]
fn parse_errors_exit_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "bad.g", "n 3\ne 1 0 x\n");
    let o = run(&["gap", "report", "--graph", &g]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(run(&["color", "prob", "--nope"]).status.code(), Some(2));
    assert_eq!(run(&["color", "prob", "--q", "4", "--word", "15"]).status.code(), Some(2));
}

#[test]
fn simulation_is_seeded_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("contact.json");
    let csv = dir.path().join("edge.csv");
    let args = [
        "sim", "contact", "--lambda", "2", "--L", "60", "--tmax", "5", "--trials", "20", "--seed", "11",
        "--csv", csv.to_str().unwrap(), "--json", "--out", report.to_str().unwrap(),
    ];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    let b = run(&args);
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("elapsedMs");
        v
    };
    assert_eq!(strip(json(&a)), strip(json(&b)));
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().next(), Some("t,edge"));

    let r = run(&["replay", "--report", report.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0));
    assert!(stdout(&r).contains("identical"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "exp.cfg", "# duality run\ncycle = 6\nset = 0, 2\ntrials = 200\nseed = 3\n");
    let o = run(&["sim", "duality", "--config", &cfg, "--trials", "100", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["inputs"]["trials"], 100);
    assert_eq!(v["inputs"]["cycle"], 6);
    let dup = write(dir.path(), "dup.cfg", "seed = 1\nseed = 2\n");
    assert_eq!(run(&["sim", "contact", "--config", &dup]).status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["sim", "voter", "--cycle", "8", "--tmax", "50", "--trials", "40", "--seed", "5", "--json"];
    let one = run(&[&["--parallel", "1"], &args[..]].concat());
    let four = run(&[&["--parallel", "4"], &args[..]].concat());
    let strip = |mut v: Value| {
        let o = v.as_object_mut().unwrap();
        o.remove("elapsedMs");
        o.remove("threads");
        v
    };
    assert_eq!(strip(json(&one)), strip(json(&four)));
}
