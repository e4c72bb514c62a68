use std::path::PathBuf;
use std::process::{Command, Output};

use qamean::cli::{format_sweep_csv, parse_sweep_csv};

const POWER_GENERATOR: &str = r#"{"op":"identity","domain":[0,null]}"#;

fn qam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qam"))
        .args(args)
        .env_remove("QAM_SEED")
        .output()
        .expect("spawn qam")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_csv(name: &str, body: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn root_prints_cube_root_coefficients() {
    let out = qam(&["root", "--a", "8", "--b", "7", "--k", "3"]);
    assert!(out.status.success(), "{out:?}");
    assert_eq!(stdout(&out).trim(), "p=2 q=1");
}

#[test]
fn root_rejects_even_root_of_reversing_map() {
    let out = qam(&["root", "--a", "-4", "--b", "1", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NoRootError"));
}

#[test]
fn geometric_mean_of_two_and_eight() {
    let sample = write_csv("geo.csv", "value,weight\n2,0.5\n8,0.5\n");
    let out = qam(&["mean", "--generator", r#"{"op":"ln"}"#, "--sample", sample.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    let m: f64 = stdout(&out).trim().parse().unwrap();
    assert!((m - 4.0).abs() < 1e-12, "{m}");
}

#[test]
fn solve_recovers_quadratic_mean_index() {
    let sample = write_csv("quad.csv", "value,weight\n1,0.5\n7,0.5\n");
    let out = qam(&[
        "solve",
        "--generator",
        POWER_GENERATOR,
        "--a",
        "2",
        "--b",
        "0",
        "--sample",
        sample.to_str().unwrap(),
        "--target",
        "5",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    let beta: f64 = text
        .split_whitespace()
        .find_map(|t| t.strip_prefix("beta="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((beta - 2.0).abs() < 1e-8, "{text}");
}

#[test]
fn solve_target_at_the_maximum_is_out_of_range() {
    let sample = write_csv("edge.csv", "value,weight\n1,0.5\n7,0.5\n");
    let out = qam(&[
        "solve",
        "--generator",
        POWER_GENERATOR,
        "--a",
        "2",
        "--b",
        "0",
        "--sample",
        sample.to_str().unwrap(),
        "--target",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("TargetOutOfRange"));
}

#[test]
fn sweep_is_byte_stable_and_round_trips() {
    let sample = write_csv("sweep.csv", "value,weight\n0.5,0.2\n2,0.3\n9,0.5\n");
    let args = [
        "family-sweep",
        "--generator",
        POWER_GENERATOR,
        "--a",
        "2",
        "--b",
        "0",
        "--sample",
        sample.to_str().unwrap(),
        "--beta-min",
        "-3",
        "--beta-max",
        "3",
        "--steps",
        "13",
    ];
    let first = qam(&args);
    let second = qam(&args);
    assert!(first.status.success(), "{first:?}");
    assert_eq!(first.stdout, second.stdout);

    let text = stdout(&first);
    let rows = parse_sweep_csv(&text).unwrap();
    assert_eq!(rows.len(), 13);
    assert_eq!(format_sweep_csv(&rows), text);
    assert!(rows.windows(2).all(|w| w[0].1 <= w[1].1));
}

#[test]
fn sweep_with_explicit_list_resolves_limits() {
    let sample = write_csv("limits.csv", "value,weight\n0.5,0.5\n9,0.5\n");
    let out = qam(&[
        "family-sweep",
        "--generator",
        POWER_GENERATOR,
        "--a",
        "2",
        "--b",
        "0",
        "--sample",
        sample.to_str().unwrap(),
        "--betas",
        "-2e6,0,2e6",
    ]);
    assert!(out.status.success(), "{out:?}");
    let rows = parse_sweep_csv(&stdout(&out)).unwrap();
    assert_eq!(rows[0].1, 0.5);
    assert!((rows[1].1 - 4.5_f64.sqrt()).abs() < 1e-11);
    assert_eq!(rows[2].1, 9.0);
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = qam(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_generator_is_an_input_error() {
    let sample = write_csv("bad.csv", "value,weight\n1,0.5\n2,0.5\n");
    let out = qam(&["mean", "--generator", r#"{"op":"sqrt"}"#, "--sample", sample.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reports_json_and_succeeds() {
    let out = qam(&["verify", "--suite", "internality", "--trials", "50", "--seed", "9"]);
    assert!(out.status.success(), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(true));
    assert_eq!(report["seed"], 9);
    assert!(report["reports"].as_array().is_some_and(|r| !r.is_empty()));

    let again = qam(&["verify", "--suite", "internality", "--trials", "50", "--seed", "9"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn verify_seed_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_qam"))
        .args(["verify", "--suite", "translation", "--trials", "20"])
        .env("QAM_SEED", "1234")
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["seed"], 1234);
}
