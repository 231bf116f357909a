use std::fs;
use std::process::{Command, Output};

use previewsafe::casestudies::example1_config;
use previewsafe::geometry::HPolytope;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_previewsafe")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn check_verdicts() {
    let ok = run(&["check", "--case", "brunovsky", "--n", "10", "--c", "0.2", "--preview", "6"]);
    assert_eq!(code(&ok), 0);
    let v = stdout_json(&ok);
    assert_eq!(v["nonempty"], Value::Bool(true));
    assert_eq!(v["agree"], Value::Bool(true));

    let empty = run(&["check", "--case", "brunovsky", "--n", "10", "--c", "0.23", "--preview", "10"]);
    assert_eq!(code(&empty), 3);
    assert_eq!(stdout_json(&empty)["nonempty"], Value::Bool(false));
}

#[test]
fn config_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"A\": [[1]], ").unwrap();
    assert_eq!(code(&run(&["check", "--system", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["check", "--system", "/nonexistent/system.json"])), 2);
    assert_eq!(code(&run(&["invariant"])), 2);
    assert_eq!(code(&run(&["invariant", "--case", "example4", "--tol", "-1"])), 2);
    assert_eq!(code(&run(&["invariant", "--case", "example4", "--method", "3"])), 2);
    assert_eq!(code(&run(&["invariant", "--case", "example4", "--method", "2"])), 2);
    assert_eq!(code(&run(&["check", "--case", "example4"])), 2);
    assert_eq!(code(&run(&["sweep-c", "--n", "0"])), 2);
}

#[test]
fn example4_is_empty() {
    let out = run(&["invariant", "--case", "example4", "--method", "1"]);
    assert_eq!(code(&out), 3);
    let v = stdout_json(&out);
    assert_eq!(v["converged"], Value::Bool(true));
    let set: HPolytope = serde_json::from_value(v["result"].clone()).unwrap();
    assert!(set.is_empty().unwrap());
}

#[test]
fn example1_seed_is_unchanged() {
    let out = run(&["invariant", "--case", "example1", "--preview", "1", "--method", "2", "--K", "10"]);
    assert_eq!(code(&out), 0);
    let set: HPolytope = serde_json::from_value(stdout_json(&out)["result"].clone()).unwrap();
    assert!(set.set_equal(&example1_config(1).1).unwrap());
}

#[test]
fn closed_form_matches_method1() {
    let args = ["invariant", "--case", "brunovsky", "--n", "2", "--c", "0.1", "--preview", "2"];
    let cf = run(&[&args[..], &["--closed-form"]].concat());
    let m1 = run(&[&args[..], &["--method", "1"]].concat());
    assert_eq!((code(&cf), code(&m1)), (0, 0));
    let a: HPolytope = serde_json::from_value(stdout_json(&cf)["polytope"].clone()).unwrap();
    let b: HPolytope = serde_json::from_value(stdout_json(&m1)["result"].clone()).unwrap();
    assert!(a.set_equal(&b).unwrap());

    let empty = run(&["invariant", "--case", "brunovsky", "--n", "3", "--c", "0.9", "--closed-form"]);
    assert_eq!(code(&empty), 3);
}

#[test]
fn sweep_reproduces_the_plateau() {
    let out = run(&["sweep-c", "--n", "10", "--p-max", "12"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,largest_c"));
    let values: Vec<f64> = lines.map(|l| l.split_once(',').unwrap().1.parse().unwrap()).collect();
    assert_eq!(values.len(), 13);
    assert!(values.windows(2).all(|w| w[1] >= w[0]));
    assert!((values[0] - 0.1).abs() < 1e-6 && (values[5] - 0.2).abs() < 1e-6);
    assert!(values[6..].iter().all(|c| (c - 2.0 / 9.0).abs() < 1e-6));

    let json = run(&["sweep-c", "--n", "1", "--p-max", "1", "--format", "json"]);
    let v = stdout_json(&json);
    assert_eq!(v[1]["largest_c"], Value::Null);
}

#[test]
fn bounds_report_gaps() {
    let out = run(&["bounds", "--case", "example4", "--preview", "1"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["inner_vol"].as_f64(), Some(0.0));
    assert!(v["gap"].as_f64().unwrap() >= 0.0);

    // with one extra preview step the gap per unit of D^p approaches its
    // limit geometrically, halving for a = 2
    let normalized: Vec<f64> = (0..=3)
        .map(|p| {
            let (lo, hi) = (p.to_string(), (p + 1).to_string());
            let out = run(&["bounds", "--case", "example2", "--p-low", &lo, "--preview", &hi, "--samples", "200000"]);
            let gap = stdout_json(&out)["gap"].as_f64().unwrap();
            assert!(gap >= 0.0);
            gap / 2f64.powi(p + 1)
        })
        .collect();
    let steps: Vec<f64> = normalized.windows(2).map(|w| w[0] - w[1]).collect();
    for w in steps.windows(2) {
        assert!((w[1] / w[0] - 0.5).abs() < 0.1, "{normalized:?}");
    }
}

#[test]
fn simulate_is_reproducible() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let out = run(&["simulate", "--seed", "4", "--out", d.path().to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["trace_preview.csv", "trace_no_preview.csv", "summary.json"] {
        let a = fs::read(dirs[0].path().join(name)).unwrap();
        let b = fs::read(dirs[1].path().join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    let summary: Value = serde_json::from_slice(&fs::read(dirs[0].path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["gap_found"], Value::Bool(true));
    assert_eq!(summary["preview"]["first_unsafe"], Value::Null);
    assert!(summary["no_preview"]["first_unsafe"].is_u64());
}

#[test]
fn exported_cases_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("example4.json");
    let out = run(&["export", "--case", "example4", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let from_file = run(&["invariant", "--system", path.to_str().unwrap(), "--preview", "1"]);
    assert_eq!(code(&from_file), 3);

    let path = dir.path().join("brunovsky.json");
    run(&[
        "export",
        "--case",
        "brunovsky",
        "--n",
        "3",
        "--c",
        "0.1",
        "--preview",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    let check = run(&["check", "--system", path.to_str().unwrap()]);
    assert_eq!(code(&check), 0);
    assert_eq!(stdout_json(&check)["p"], Value::from(2));
}

#[test]
fn outputs_are_byte_identical() {
    for args in [
        &["invariant", "--case", "example5", "--preview", "1"][..],
        &["bounds", "--case", "example2", "--p-low", "1", "--preview", "2", "--seed", "3"][..],
    ] {
        let (a, b) = (run(args), run(args));
        assert_eq!(a.stdout, b.stdout);
    }
}
