//! End-to-end checks of the command-line surface: output formats, the
//! exit-code contract (0 success, 1 verification failure, 2 config error,
//! 3 numeric failure), and byte-level output determinism.

use std::process::{Command, Output};

fn mkz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mkz"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn eval_reproduces_linear_function() {
    let out = mkz(&[
        "eval",
        "--op",
        "mkz-gs-mod",
        "--n",
        "6",
        "-f",
        "e1",
        "--points",
        "0.3",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,value");
    let row = lines.next().unwrap();
    let value: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((value - 0.3).abs() < 1e-9, "got {value}");
    // 17 significant digits in the output.
    assert!(row.split(',').nth(1).unwrap().contains('e'));
}

#[test]
fn eval_constant_under_gs() {
    let out = mkz(&[
        "eval", "--op", "mkz-gs", "--n", "4", "-f", "e0", "--points", "0.5",
    ]);
    assert!(out.status.success());
    let v: f64 = stdout(&out)
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((v - 1.0).abs() < 1e-9);
}

#[test]
fn eval_out_of_domain_is_config_error() {
    let out = mkz(&[
        "eval", "--op", "mkz-gs", "--n", "4", "-f", "e0", "--points", "1.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_beyond_documented_window_is_config_error() {
    let out = mkz(&[
        "eval", "--op", "mkz-gs", "--n", "4", "-f", "e0", "--points", "0.9999",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_function_and_operator_are_config_errors() {
    let out = mkz(&[
        "eval", "--op", "mkz-gs", "--n", "4", "-f", "nope", "--points", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = mkz(&[
        "eval", "--op", "mkz", "--n", "4", "-f", "e0", "--points", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn truncation_overflow_is_numeric_failure() {
    // The series mass for this point sits far beyond the term cap.
    let out = mkz(&[
        "eval",
        "--op",
        "baskakov",
        "--n",
        "10",
        "-f",
        "e1",
        "--points",
        "1000000",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn converge_rejects_short_order_lists() {
    let out = mkz(&[
        "converge",
        "--op",
        "mkz-gs-mod",
        "-f",
        "x2",
        "--n-list",
        "4,8",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kfunc_bounds_are_ordered() {
    let out = mkz(&["kfunc", "-f", "e1", "--n-list", "8"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lower: f64 = field(&text, "lower");
    let upper: f64 = field(&text, "upper");
    assert!(lower <= upper + 1e-12, "lower={lower} upper={upper}");
    assert!(lower.abs() < 1e-8, "linear functions have zero K-functional");
}

fn field(json: &str, name: &str) -> f64 {
    let key = format!("\"{name}\":");
    let start = json.find(&key).unwrap() + key.len();
    let rest = &json[start..];
    let end = rest.find([',', '}']).unwrap();
    rest[..end].parse().unwrap()
}

#[test]
fn list_functions_shows_registry() {
    let out = mkz(&["list-functions"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for id in ["e0", "e1", "x2", "sinpi", "rational", "sqrt"] {
        assert!(text.contains(id), "missing {id}");
    }
    assert!(text.contains("W2_0"));
}

#[test]
fn verify_output_is_byte_deterministic() {
    let a = mkz(&["verify", "--suite", "voronovskaya", "--seed", "7"]);
    let b = mkz(&["verify", "--suite", "voronovskaya", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "same seed must give identical bytes");
}

#[test]
fn verify_passes_and_reports_json() {
    let out = mkz(&["verify", "--suite", "voronovskaya"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.trim_start().starts_with('['));
    assert!(text.contains("\"id\":\"voronovskaya-ratio\""));
    assert!(text.contains("\"pass\":true"));
}
