use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use maxreal_maxsat::{solve_builtin, WcnfInstance};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn maxreal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxreal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Values of `key: value` lines, in order.
fn field<'a>(report: &'a str, key: &str) -> Vec<&'a str> {
    report
        .lines()
        .filter_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(": ")))
        .collect()
}

#[test]
fn trivial_spec_is_certified_at_one_state() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("t.spec");
    fs::write(&spec, "inputs:\noutputs: o\nhard: true\n").unwrap();
    let out = dir.path().join("out");
    let o = maxreal(&["synth", path(&spec), "--min-bound", "1", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = stdout(&o);
    assert_eq!(field(&rep, "result"), ["certified"]);
    assert_eq!(field(&rep, "implementation_bound"), ["1"]);
    assert!(out.join("implementation.dot").is_file());
    assert_eq!(fs::read_to_string(out.join("report.txt")).unwrap(), rep);
}

#[test]
fn restaurant_synthesis_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let spec = fixture("restaurant.spec");
    let o = maxreal(&[
        "synth",
        path(&spec),
        "--min-bound",
        "1",
        "--max-bound",
        "3",
        "--schedule",
        "step:1",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rep = stdout(&o);
    assert_eq!(field(&rep, "status"), ["optimum"; 3]);
    assert_eq!(field(&rep, "value"), ["(2,0,0)"]);
    // the check command reads the report and follows it to the DOT file
    let c = maxreal(&["check", path(&spec), "--impl", path(&dir.path().join("report.txt"))]);
    assert_eq!(c.status.code(), Some(0));
    let out = stdout(&c);
    assert_eq!(field(&out, "hard"), ["pass"]);
    assert_eq!(field(&out, "value"), ["(2,0,0)"]);
}

#[test]
fn threshold_stops_early() {
    let dir = tempfile::tempdir().unwrap();
    let o = maxreal(&[
        "synth",
        path(&fixture("restaurant.spec")),
        "--min-bound",
        "1",
        "--max-bound",
        "3",
        "--schedule",
        "step:1",
        "--threshold",
        "7",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "bound"), ["1"]);
}

#[test]
fn waiter_machine_value() {
    let spec = fixture("restaurant.spec");
    let c = maxreal(&["check", path(&spec), "--impl", path(&fixture("waiter.dot"))]);
    assert_eq!(c.status.code(), Some(0));
    let out = stdout(&c);
    assert_eq!(field(&out, "hard"), ["pass"]);
    assert_eq!(field(&out, "soft_1"), ["level 3 G F (req1 -> X table1)"]);
    assert_eq!(field(&out, "value"), ["(2,0,0)"]);
}

#[test]
fn tampered_machine_fails_hard_spec() {
    let dir = tempfile::tempdir().unwrap();
    let dot = fs::read_to_string(fixture("waiter.dot"))
        .unwrap()
        .replace("req1 req2 / table1 !table2", "req1 req2 / table1 table2");
    let tampered = dir.path().join("bad.dot");
    fs::write(&tampered, dot).unwrap();
    let c = maxreal(&["check", path(&fixture("restaurant.spec")), "--impl", path(&tampered)]);
    assert_eq!(c.status.code(), Some(2));
    assert_eq!(field(&stdout(&c), "hard"), ["fail"]);
}

#[test]
fn check_without_soft_specs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("hard.spec");
    fs::write(&spec, "inputs: req1 req2\noutputs: table1 table2\nhard: G (!table1 | !table2)\n").unwrap();
    let c = maxreal(&["check", path(&spec), "--impl", path(&fixture("waiter.dot"))]);
    assert_eq!(c.status.code(), Some(0));
    assert_eq!(field(&stdout(&c), "value"), ["()"]);
}

#[test]
fn malformed_inputs_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.spec");
    fs::write(&bad, "inputs: a\nhard: G (a\n").unwrap();
    assert_eq!(maxreal(&["synth", path(&bad)]).status.code(), Some(1));
    let junk = dir.path().join("junk.dot");
    fs::write(&junk, "s0 -> s1\n").unwrap();
    let c = maxreal(&["check", path(&fixture("restaurant.spec")), "--impl", path(&junk)]);
    assert_eq!(c.status.code(), Some(1));
    assert_eq!(maxreal(&["bench", "power", "13"]).status.code(), Some(1));
    assert_eq!(maxreal(&["bench", "power"]).status.code(), Some(1));
}

#[test]
fn zero_timeout_reports_timeout() {
    let dir = tempfile::tempdir().unwrap();
    let o = maxreal(&[
        "synth",
        path(&fixture("restaurant.spec")),
        "--timeout-s",
        "0",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(field(&stdout(&o), "result"), ["timeout"]);
}

#[test]
fn encode_power_instance() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("p5.spec");
    let out = dir.path().join("out");
    let b = maxreal(&[
        "bench",
        "power",
        "5",
        "--bound",
        "2",
        "--emit-spec",
        path(&spec),
        "--out",
        path(&out),
    ]);
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(field(&stdout(&b), "weight"), ["3", "3"]);

    let e = maxreal(&["encode", path(&spec), "--bound", "2", "--out", path(&out)]);
    assert_eq!(e.status.code(), Some(0));
    // one soft spec: n + n^2 + n^3 = 3
    assert!(stdout(&e).trim_end().ends_with("soft_weight: 3"), "{}", stdout(&e));
    let text = fs::read_to_string(out.join("b2.wcnf")).unwrap();
    let inst = WcnfInstance::parse_wdimacs(&text).unwrap();
    assert_eq!(inst.to_wdimacs(), text);
    assert_eq!(solve_builtin(&inst, None).satisfied_weight(), Some(3));
    let map = fs::read_to_string(out.join("b2.varmap")).unwrap();
    assert!(map.lines().any(|l| l.starts_with("tau_0_0_")));

    // encoding is deterministic
    let again = dir.path().join("again");
    maxreal(&["encode", path(&spec), "--bound", "2", "--out", path(&again)]);
    assert_eq!(fs::read_to_string(again.join("b2.wcnf")).unwrap(), text);
}

#[test]
fn external_backend_with_fixture_solver() {
    let Some(rc2) = std::env::var_os("PATH")
        .and_then(|p| std::env::split_paths(&p).map(|d| d.join("rc2.py")).find(|p| p.is_file()))
    else {
        eprintln!("rc2.py not on PATH; skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let cmd = format!("{} -vvv", rc2.display());
    let o = maxreal(&[
        "bench",
        "power",
        "1",
        "--bound",
        "2",
        "--backend",
        "external",
        "--solver-cmd",
        &cmd,
        "--out",
        path(dir.path()),
        "--emit-wcnf",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(field(&stdout(&o), "weight"), ["8", "8"]);
    assert!(dir.path().join("b2.wcnf").is_file());
}

#[test]
fn robot_small_bounds_are_unrealizable() {
    let dir = tempfile::tempdir().unwrap();
    let o = maxreal(&["bench", "robot", "--max-bound", "4", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    let rep = stdout(&o);
    assert_eq!(field(&rep, "bound"), ["2", "4"]);
    assert_eq!(field(&rep, "status"), ["unsat", "unsat"]);
    assert_eq!(field(&rep, "result"), ["unrealizable"]);
    assert!(!dir.path().join("implementation.dot").exists());
}
