use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_chaos-edge"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn descriptor_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

const FULL_TENT: &str = r#"{"kind":"stunted","m":1,"epsilon":1,"xi":["3/2"]}"#;
const M1_PATH: &str = r#"{"kind":"stunted","m":1,"epsilon":1,"origin":["0"],"direction":["1"],"t_lo":"1/2","t_hi":"3/2"}"#;

#[test]
fn entropy_of_full_tent_from_file() {
    let f = descriptor_file(FULL_TENT);
    let v = json_of(&run(&["entropy", f.path().to_str().unwrap()], ""));
    let ln2 = 2f64.ln();
    assert!((v["markov"].as_f64().unwrap() - ln2).abs() < 1e-10);
    assert!((v["lap"].as_f64().unwrap() - ln2).abs() < 1e-3);
}

#[test]
fn entropy_of_fixed_plateau_is_zero() {
    // ξ = 1/2 puts a fixed point on the plateau.
    let v = json_of(&run(&["entropy"], r#"{"kind":"stunted","m":1,"epsilon":1,"xi":["1/2"]}"#));
    assert!(v["markov"].as_f64().unwrap().abs() < 1e-12);
    assert!(v["lap"].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn malformed_json_exits_2_with_position() {
    let out = run(&["entropy"], "{\"kind\":\"stunted\",\n\"m\":}");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let out = run(&["entropy"], r#"{"kind":"stunted","m":1,"epsilon":1,"xi":["1/0"]}"#);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_byte_identical_with_sorted_keys() {
    let a = run(&["renorm", "--seed", "7"], r#"{"kind":"quadratic","c":-1.3107}"#);
    let b = run(&["renorm", "--seed", "7"], r#"{"kind":"quadratic","c":-1.3107}"#);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let keys: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \"") && !l.starts_with("   "))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(!keys.is_empty());
}

#[test]
fn renorm_itineraries_agree_on_samples() {
    let v = json_of(&run(&["renorm"], r#"{"kind":"quadratic","c":-1.0}"#));
    let lo = v["restrictive"]["j"]["lo"].as_f64().unwrap();
    // The period-2 point of x² − 1 is the golden-ratio conjugate.
    assert!((lo + (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-10);
    assert_eq!(v["itinerary_check"]["matched"], v["itinerary_check"]["samples"]);
}

#[test]
fn periods_report_spectrum_and_budget_exit() {
    let v = json_of(&run(&["periods", "--bound", "8"], FULL_TENT));
    assert_eq!(v["periods"], serde_json::json!([1, 2, 3, 4, 5, 6, 7, 8]));
    assert_eq!(v["spectrum"]["result"], "no");
    assert_eq!(v["spectrum"]["witness"], 3);
    let out = run(&["periods", "--budget", "10"], FULL_TENT);
    assert_eq!(out.status.code(), Some(4));
    let out = run(&["entropy", "--budget", "1"], FULL_TENT);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn kneading_shape_and_psi() {
    let out = run(&["kneading", "--depth", "6", "--format", "csv"], r#"{"kind":"quadratic","c":-1.0}"#);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "turning_point,itinerary\n1,100000\n");
    let v = json_of(&run(&["shape"], FULL_TENT));
    assert_eq!(v["value_count"], 1);
    // x² − 2 is conjugate to the full tent: Ψ lands on ξ = 3/2.
    let v = json_of(&run(&["psi", "--depth", "40"], r#"{"kind":"quadratic","c":-2.0}"#));
    assert_eq!(v["descriptor"]["xi"], serde_json::json!(["3/2"]));
    assert_eq!(v["endpoints"], serde_json::json!(["1/2"]));
}

#[test]
fn feigenbaum_ratios_approach_delta() {
    let v = json_of(&run(&["feigenbaum", "--depth", "8"], r#"{"kind":"quadratic","c_lo":-2.0,"c_hi":0.25}"#));
    let delta = v["delta"].as_f64().unwrap();
    assert!((delta - 4.669201609).abs() / 4.669201609 < 1e-3, "{delta}");
    let out = run(&["feigenbaum"], M1_PATH);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn boundary_on_m1_path() {
    let f = descriptor_file(M1_PATH);
    let v = json_of(&run(&["boundary", f.path().to_str().unwrap(), "--precision", "1e-6"], ""));
    assert!(v["gap"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["above"]["kind"], "exact");
    assert!(v["t_star_bracket"].as_array().unwrap().iter().all(|s| s.as_str().unwrap().contains('/')));
}

#[test]
fn boundary_equal_endpoints_exit_3() {
    let out = run(&["boundary"], r#"{"kind":"quadratic","c_lo":-1.4,"c_hi":-1.4}"#);
    assert_eq!(out.status.code(), Some(3));
    let same = r#"{"kind":"stunted","m":1,"epsilon":1,"origin":["0"],"direction":["1"],"t_lo":"1","t_hi":"1"}"#;
    assert_eq!(run(&["boundary"], same).status.code(), Some(3));
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn sweep_quadratic_row_count() {
    let out = run(&["sweep", "--grid", "500", "--format", "csv"], r#"{"kind":"quadratic","c_lo":-2.0,"c_hi":0.25}"#);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 500);
    assert_eq!(rows[0][0], "-2");
    assert_eq!(rows[499][0], "0.25");
}

#[test]
fn sweep_stunted_entropy_is_monotone() {
    let cloud = tempfile::NamedTempFile::new().unwrap();
    let out = run(
        &["sweep", "--grid", "21", "--format", "csv", "--cloud", cloud.path().to_str().unwrap()],
        M1_PATH,
    );
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 21);
    let h: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(h.windows(2).all(|w| w[1] >= w[0] - 1e-9), "{h:?}");
    assert!((h[20] - 2f64.ln()).abs() < 1e-10);
    assert_eq!(h[0], 0.0);
    let points = std::fs::read_to_string(cloud.path()).unwrap();
    assert!(points.lines().count() > 21);
}

#[test]
fn sweep_grid_of_one_is_an_error() {
    let out = run(&["sweep", "--grid", "1"], M1_PATH);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_cap_does_not_change_output() {
    let q = r#"{"kind":"quadratic","c_lo":-1.5,"c_hi":-1.0}"#;
    let a = run(&["sweep", "--grid", "16"], q);
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_chaos-edge"));
    cmd.args(["sweep", "--grid", "16"]).env("CHAOS_EDGE_THREADS", "1");
    let mut child = cmd.stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(q.as_bytes()).unwrap();
    let b = child.wait_with_output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}
