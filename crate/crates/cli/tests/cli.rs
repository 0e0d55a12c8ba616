use std::f64::consts::{FRAC_1_PI, PI};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const IDEAL: &str = r#"{"eps_g": 1.0, "eps_e": 1.0, "p1g": 1.0, "p1e": 0.0}"#;
const FIG2: &str = r#"{"eps_g": 0.9, "eps_e": 0.8, "p1g": 0.85, "p1e": 0.1}"#;

fn write_config(dir: &TempDir, text: &str) -> std::path::PathBuf {
    let path = dir.path().join("run.json");
    fs::write(&path, text).unwrap();
    path
}

fn run(config: Option<&Path>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_photodetect"));
    if let Some(path) = config {
        cmd.arg("--config").arg(path);
    }
    cmd.args(args).output().unwrap()
}

fn run_with(text: &str, args: &[&str]) -> Output {
    let dir = TempDir::new().unwrap();
    let path = write_config(&dir, text);
    run(Some(&path), args)
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// CSV body as rows of string fields, header dropped after checking it.
fn rows(out: &Output, header: &str) -> Vec<Vec<String>> {
    let text = stdout(out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(header));
    lines
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn validate_ideal_counter() {
    let out = run_with(IDEAL, &["validate"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = rows(&out, "check,passed,residual,tolerance");
    assert!(rows.len() > 10);
    assert!(rows.iter().all(|r| r[1] == "true"));
}

#[test]
fn validate_fig2_detector() {
    let out = run_with(FIG2, &["validate", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn validate_rejects_click_probability_above_efficiency() {
    let out = run_with(
        r#"{"eps_g": 0.5, "eps_e": 0.8, "p1g": 0.6, "p1e": 0.1}"#,
        &["validate"],
    );
    assert_eq!(out.status.code(), Some(1));
    let failed: Vec<_> = rows(&out, "check,passed,residual,tolerance")
        .into_iter()
        .filter(|r| r[1] == "false")
        .collect();
    assert_eq!(failed.len(), 1);
    assert!(failed[0][0].contains("p1g"));
    assert!(stderr(&out).contains("p1g"), "{}", stderr(&out));
}

#[test]
fn posterior_matches_closed_form() {
    let out = run_with(FIG2, &["posterior", "--xi", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = rows(&out, "theta,numeric,analytic,abs_diff");
    assert_eq!(rows.len(), 181);
    let worst = rows.iter().map(|r| num(&r[3])).fold(0.0, f64::max);
    assert!(worst <= 1e-9, "{worst}");
}

#[test]
fn posterior_uninformative_outcome_is_flat() {
    let out = run_with(
        r#"{"eps_g": 0.7, "eps_e": 0.7, "p1g": 0.2, "p1e": 0.2}"#,
        &["posterior", "--xi", "1"],
    );
    assert_eq!(out.status.code(), Some(0));
    for r in rows(&out, "theta,numeric,analytic,abs_diff") {
        assert!((num(&r[1]) - FRAC_1_PI).abs() <= 1e-12);
    }
}

#[test]
fn posterior_impossible_outcome_exits_one() {
    let out = run_with(IDEAL, &["posterior", "--xi", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).is_empty());
    assert!(!stderr(&out).is_empty());
}

#[test]
fn sweep_eps_reference_values() {
    let out = run_with(
        FIG2,
        &[
            "sweep-eps",
            "--start",
            "0",
            "--stop",
            "0.9",
            "--step",
            "0.1",
            "--theta",
            "0",
            "--xi",
            "0",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = rows(&out, "eps_g,density_at_theta,error");
    assert_eq!(rows.len(), 10);
    let expect = [(0, 5.0 / (3.0 * PI)), (8, FRAC_1_PI), (9, 2.0 / (3.0 * PI))];
    for (k, v) in expect {
        assert!(
            (num(&rows[k][1]) - v).abs() <= 1e-9,
            "row {k}: {:?}",
            rows[k]
        );
        assert_eq!(rows[k][2], "");
    }
}

#[test]
fn sweep_eps_bad_step_is_usage_error() {
    let out = run_with(
        FIG2,
        &[
            "sweep-eps",
            "--start",
            "0",
            "--stop",
            "1",
            "--step",
            "-0.1",
            "--theta",
            "0",
            "--xi",
            "0",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_ideal_counter_trajectories() {
    let out = run_with(IDEAL, &["simulate", "--rounds", "6", "--theta", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let first = rows(&out, "round,xi,p0,p1,p2,trace_check");
    assert_eq!(first.len(), 6);
    assert!(first.iter().all(|r| r[1] == "1"));

    let out = run_with(
        IDEAL,
        &["simulate", "--rounds", "3", "--theta", &PI.to_string()],
    );
    let xis: Vec<_> = rows(&out, "round,xi,p0,p1,p2,trace_check")
        .into_iter()
        .map(|r| r[1].clone())
        .collect();
    assert_eq!(xis, ["2", "1", "1"]);
}

#[test]
fn simulate_is_reproducible_per_seed() {
    let args = [
        "simulate", "--rounds", "50", "--theta", "1.1", "--seed", "42",
    ];
    let a = run_with(FIG2, &args);
    let b = run_with(FIG2, &args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_errors_are_usage_errors() {
    let out = run_with(
        r#"{"eps_g": 0.9, "eps_e": 0.8, "p1g": 0.85, "p1e": 0.1, "epsg": 1}"#,
        &["validate"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("epsg"), "{}", stderr(&out));

    let out = run(None, &["validate"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(Some(Path::new("/nonexistent/run.json")), &["validate"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run_with(FIG2, &["posterior", "--xi", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_output_to_file() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, FIG2);
    let target = dir.path().join("post.json");
    let out = run(
        Some(&config),
        &[
            "posterior",
            "--xi",
            "2",
            "--format",
            "json",
            "--out",
            target.to_str().unwrap(),
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&target).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rows = value.as_array().unwrap();
    assert_eq!(rows.len(), 181);
    let keys: Vec<_> = rows[0].as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys, ["theta", "numeric", "analytic", "abs_diff"]);
}
