use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BALL3: &str = r#"{"kind":"ball","center":[0,0,0],"radius":1}"#;
const DISK: &str = r#"{"kind":"ball","center":[0,0],"radius":1}"#;
const ELLIPSOID: &str = r#"{"kind":"ellipsoid","center":[0,0,0],"semi_axes":[1,1,1.4]}"#;
const SQUARE: &str = r#"{"kind":"polygon2d","vertices":[[0,0],[0.5,0],[0.5,0.5],[0,0.5]]}"#;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pompeiu-lab")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = lab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn validator() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn assert_valid(v: &Value) {
    let errors: Vec<String> = validator().iter_errors(v).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{}: {errors:?}", v["command"]);
}

/// Zeros of `x cos x - sin x` by bisection.
fn j32_zero(j: usize) -> f64 {
    let f = |x: f64| x * x.cos() - x.sin();
    let pi = std::f64::consts::PI;
    let (mut lo, mut hi) = (j as f64 * pi, j as f64 * pi + pi / 2.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == f(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[test]
fn scan_lists_ball_shells() {
    let r = report(&["scan", "--domain", BALL3, "--kmax", "10"]);
    let shells: Vec<f64> = serde_json::from_value(r["results"]["shells"].clone()).unwrap();
    assert_eq!(shells.len(), 2);
    for (j, k) in shells.iter().enumerate() {
        assert!((k - j32_zero(j + 1)).abs() < 1e-6, "{k}");
    }
    assert_eq!(r["schema"], "pompeiu-lab/1");
    assert_eq!(r["seed"], 1);
    assert_eq!(r["inputs"]["kmax"], 10.0);
}

#[test]
fn equal_radii_resonate() {
    let r = report(&["two-radii", "--r1", "1", "--r2", "1"]);
    assert_eq!(r["results"]["verdict"]["verdict"], "resonant");
    assert_eq!(r["results"]["verdict"]["j"], 1);
    assert_eq!(r["results"]["verdict"]["m"], 1);
}

#[test]
fn mismatched_dimensions_exit_2() {
    let out = lab(&["verify", "--domain", BALL3, "--b", "4.4934", "--dim", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("dimension mismatch"), "{msg}");
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_configuration_exits_2() {
    for args in [
        vec!["two-radii", "--r1", "1", "--r2", "2", "--tol", "0"],
        vec!["two-radii", "--r1", "1", "--r2", "2", "--tol", "-1"],
        vec!["scan"],
        vec!["scan", "--domain", "{\"kind\":\"ball\",\"center\":[0,0,0],\"radius\":-1}"],
        vec!["scan", "--domain", "/no/such/domain.json"],
        vec!["ft", "--domain", BALL3, "--xi", "1,0"],
        vec!["two-radii", "--r1", "1", "--r2", "2", "--format", "csv"],
        vec!["no-such-subcommand"],
        vec![],
    ] {
        let out = lab(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn fail_verdict_still_exits_0() {
    let r = report(&["verify", "--domain", BALL3, "--b", "4.0", "--motions", "3"]);
    assert_eq!(r["results"]["verdict"], "fail");
}

#[test]
fn every_report_matches_the_schema() {
    let runs: Vec<Vec<&str>> = vec![
        vec!["ft", "--domain", ELLIPSOID, "--xi", "1,-2,0.5", "--budget", "24"],
        vec!["scan", "--domain", DISK, "--kmax", "5", "--ksteps", "200", "--dirs", "64"],
        vec!["counterexample", "--b", "3.8317", "--dim", "2", "--coeffs", "1,0,0.5", "--at", "0.1,-0.3"],
        vec!["verify", "--domain", BALL3, "--b", "4.493409457909064", "--motions", "5"],
        vec!["overdet", "--n", "3", "--dirs", "4"],
        vec!["conj5", "--a", "2", "--n", "2"],
        vec!["sphere-test", "--domain", ELLIPSOID, "--nodes", "33,65"],
        vec!["two-radii", "--r1", "1.001", "--r2", "1"],
        vec!["morera", "--domain", SQUARE, "--field", "exp", "--h", "1e-2", "--bound", "0.5"],
        vec!["conj6", "--domain", BALL3, "--lambda", "1", "--theta", "0.5", "--k", "4.493409457909064"],
        vec!["factor", "--domain", BALL3, "--kstar", "5", "--probes", "4"],
    ];
    for args in runs {
        let r = report(&args);
        assert_eq!(r["command"], args[0]);
        assert_valid(&r);
    }
}

#[test]
fn csv_outputs() {
    let out = lab(&["scan", "--domain", DISK, "--kmax", "5", "--ksteps", "100", "--dirs", "64", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("k,sup_abs,inconclusive\n"));
    assert_eq!(text.lines().count(), 101);
    let out = lab(&["overdet", "--n", "2", "--format", "csv"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("r,u\n"));
}

#[test]
fn seeded_reports_are_byte_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let path = dir.path().join(name);
        let out = lab(&[
            "verify", "--domain", DISK, "--b", "3.831705970207512", "--coeffs", "1,0,0.5",
            "--motions", "6", "--bound", "3", "--seed", seed, "--out", path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        std::fs::read(path).unwrap()
    };
    let (a, b, c) = (run("a.json", "9"), run("b.json", "9"), run("c.json", "10"));
    assert_eq!(a, b);
    assert_ne!(a, c);
    // three reports and no leftover temporary files
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 3);
}

#[test]
fn check_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    let out = lab(&["--check", "--out", first.to_str().unwrap()]);
    assert!(out.status.success());
    let table = String::from_utf8(out.stdout).unwrap();
    for id in 1..=12 {
        assert!(table.contains(&format!("criterion {id:>2} PASS")), "{table}");
    }
    assert!(table.contains("12/12 criteria passed"));
    let out = lab(&["check", "--out", second.to_str().unwrap()]);
    assert!(out.status.success());
    let (a, b) = (std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    assert_eq!(a, b, "two --check runs differ");
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_valid(&v);
    assert_eq!(v["results"]["all_passed"], true);
}

#[test]
fn schema_rejects_malformed_reports() {
    let good = report(&["two-radii", "--r1", "2", "--r2", "1"]);
    assert_valid(&good);
    let v = validator();
    let mut bad = good.clone();
    bad["schema"] = Value::from("pompeiu-lab/0");
    assert!(!v.is_valid(&bad));
    let mut bad = good.clone();
    bad["results"]["verdict"]["verdict"] = Value::from("maybe");
    assert!(!v.is_valid(&bad));
    let mut bad = good;
    bad.as_object_mut().unwrap().remove("seed");
    assert!(!v.is_valid(&bad));
}
