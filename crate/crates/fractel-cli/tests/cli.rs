//! End-to-end tests of the `fractel` binary: worked values, file outputs,
//! and the exit-code contract (0 pass, 1 fail, 2 usage, 3 I/O).

use std::path::PathBuf;
use std::process::{Command, Output};

fn fractel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fractel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("fractel-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn verify_builtin_fixture_passes() {
    let out = fractel(&["verify", "ex4_5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("ex4_5"));
    assert!(text.contains("PASS"));
}

#[test]
fn verify_sqrt_piece_passes() {
    let out = fractel(&["verify", "sqrt_w1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("PASS"));
}

#[test]
fn verify_all_builtins_via_fixture_file() {
    let table = fractel::textio::builtin_fixtures();
    let path = tmp_path("fixtures.txt");
    let text: String = table
        .iter()
        .map(|r| format!("{}\n", r.to_line()))
        .collect();
    std::fs::write(&path, text).unwrap();
    let out = fractel(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).matches("PASS").count(), table.len());
    std::fs::remove_file(&path).ok();
}

#[test]
fn verify_reports_failure_with_exit_one() {
    // a fixture that is wrong on purpose: (x/2, y/4) against x^3
    let path = tmp_path("bad-fixture.txt");
    std::fs::write(&path, "bad 0.5 0 0.25 zero power 1 3 0 1\n").unwrap();
    let out = fractel(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn verify_unknown_fixture_is_usage_error() {
    let out = fractel(&["verify", "definitely_not_a_fixture"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tight_tolerance_semantics_are_stable() {
    // ex4_5 has residual exactly zero, so even an extreme tolerance passes;
    // sqrt_w1 rounds through irrational values and must fail at 1e-20
    let out = fractel(&["verify", "ex4_5", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(0));
    let out = fractel(&["verify", "sqrt_w1", "--tol", "1e-20"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn polyeval_worked_values() {
    let out = fractel(&["polyeval", "1,3,2,1", "1.2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("value = 1151/125"), "{text}");
    assert!(
        text.contains("state = 1151/125 303/2500 7/12500 1/1000000"),
        "{text}"
    );

    let out = fractel(&["polyeval", "1,3,2,1", "1.23"]);
    assert!(stdout(&out).contains("value = 9576667/1000000"));
}

#[test]
fn polyeval_constant_ignores_digits() {
    let out = fractel(&["polyeval", "5", "9.99"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("value = 5"));
}

#[test]
fn polyeval_float_mode_and_decimal_rendering() {
    let out = fractel(&["polyeval", "1,3,2,1", "1.2", "--mode", "float"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let value: f64 = text
        .lines()
        .next()
        .unwrap()
        .strip_prefix("value = ")
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 9.208).abs() < 1e-12);
    let out = fractel(&["polyeval", "1,3,2,1", "1.2", "--decimals", "3"]);
    assert!(stdout(&out).contains("decimal = 9.208"));
}

#[test]
fn polyeval_rejects_bad_digits() {
    assert_eq!(fractel(&["polyeval", "1,2", "12.3"]).status.code(), Some(2));
    assert_eq!(fractel(&["polyeval", "1,x", "1.2"]).status.code(), Some(2));
    // base 16 accepts hex digits
    assert_eq!(
        fractel(&["polyeval", "1,1", "a.8", "--base", "16"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn polybasis_known_matrices() {
    let out = fractel(&["polybasis", "hat", "1/2", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("1 1/2\n0 1/2\n"), "{text}");
    assert!(text.contains("stochastic: true"));

    let out = fractel(&["polybasis", "chebyshev3", "1/2", "1/2"]);
    let text = stdout(&out);
    assert!(text.contains("-1/4 3/8 3/4 1/8"), "{text}");

    let out = fractel(&["polybasis", "monomial", "1", "0"]);
    let text = stdout(&out);
    assert!(text.starts_with("1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n"), "{text}");
}

#[test]
fn polybasis_rejects_bad_input() {
    assert_eq!(
        fractel(&["polybasis", "hat", "zzz", "0"]).status.code(),
        Some(2)
    );
    // slope 2 leaves [0, 1]
    assert_eq!(
        fractel(&["polybasis", "hat", "2", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        fractel(&["polybasis", "unknown", "1/2", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn approx_writes_profile_csv_with_matching_summary() {
    let path = tmp_path("profile.csv");
    let out = fractel(&[
        "approx",
        "sqrt",
        "--rule",
        "midpoint",
        "--grid",
        "200",
        "--iterations",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let printed_summary = stdout(&out);
    assert!(printed_summary.starts_with("# max_abs_e="));

    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,e(x)"));
    // recompute the summary from the rows: must reproduce the printed value
    let mut max_abs: f64 = 0.0;
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        if line.starts_with('#') {
            assert_eq!(format!("{line}\n"), printed_summary);
            continue;
        }
        let (x, e) = line.split_once(',').unwrap();
        let _: f64 = x.parse().unwrap();
        let e: f64 = e.parse().unwrap();
        max_abs = max_abs.max(e.abs());
        rows += 1;
    }
    assert_eq!(rows, 200);
    let reported = printed_summary
        .split_whitespace()
        .find_map(|t| t.strip_prefix("max_abs_e="))
        .unwrap();
    assert_eq!(reported.parse::<f64>().unwrap(), max_abs);
    std::fs::remove_file(&path).ok();
}

#[test]
fn approx_rejects_unknown_rule_and_target() {
    assert_eq!(
        fractel(&["approx", "sqrt", "--rule", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(fractel(&["approx", "cbrt"]).status.code(), Some(2));
}

#[test]
fn bench_reports_methods_per_polynomial() {
    let path = tmp_path("polys.txt");
    std::fs::write(&path, "1,3,2,1 1.23\n1,-6,15,-20,15,-6,1 1.0001\n").unwrap();
    let out = fractel(&[
        "bench",
        path.to_str().unwrap(),
        "--repetitions",
        "64",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("poly_id,x,method,value,rel_err,ns_per_eval\n"));
    assert!(text.contains("p1,1.23,exact,9576667/1000000,0,"));
    assert!(text.contains("p1,1.23,horner,"));
    assert!(text.contains("p2,1.0001,digit_ifs,"));
    assert_eq!(text.lines().count(), 1 + 2 * 3);
    std::fs::remove_file(&path).ok();
}

#[test]
fn bench_empty_file_gives_header_only() {
    let path = tmp_path("empty.txt");
    std::fs::write(&path, "").unwrap();
    let out = fractel(&["bench", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "poly_id,x,method,value,rel_err,ns_per_eval\n");
    std::fs::remove_file(&path).ok();
}

#[test]
fn bench_parse_errors_name_the_line() {
    let path = tmp_path("badpolys.txt");
    std::fs::write(&path, "1,2 1.5\n1,oops 1.5\n").unwrap();
    let out = fractel(&["bench", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn missing_input_file_is_io_error() {
    let out = fractel(&["bench", "/nonexistent/polys.txt"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = fractel(&["verify", "ex4_5", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}
