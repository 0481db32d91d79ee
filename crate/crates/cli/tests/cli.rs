use std::path::Path;
use std::process::{Command, Output};

use nambu_core::report::VerificationReport;
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nambu-verify")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
#[allow(clippy::approx_constant)]
fn orbit_circular_nambu_passes() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("orbit.csv");
    let out = run(&["orbit", "--z0", "1,0,0,1,0,0", "--rhs", "nambu", "--t-max", "6.2832", "--tol", "1e-10", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("closure_residual"));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,x,px,y,py,z,pz,H,L3,kepler_residual");
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last[0], 6.2832);
    assert!((last[1] - 1.0).abs() < 1e-4 && last[3].abs() < 1e-4);
}

#[test]
fn orbit_zero_angular_momentum_is_usage_error() {
    let out = run(&["orbit", "--z0", "1,0,0,0,0,0", "--rhs", "nambu", "--t-max", "1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero angular momentum"));
}

#[test]
fn orbit_zero_duration_writes_one_row() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("orbit.csv");
    for rhs in ["hamilton", "nambu", "alt"] {
        let out = run(&["orbit", "--z0", "1,0,0,1,0,0", "--rhs", rhs, "--t-max", "0", "--out", csv.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 2);
    }
}

#[test]
fn orbit_invalid_flags() {
    assert_eq!(code(&run(&["orbit", "--z0", "1,0,0", "--t-max", "1"])), 2);
    assert_eq!(code(&run(&["orbit", "--z0", "1,0,0,1,0,0", "--rhs", "euler", "--t-max", "1"])), 2);
    assert_eq!(code(&run(&["orbit", "--z0", "1,0,0,1,0,0", "--t-max", "-1"])), 2);
    assert_eq!(code(&run(&["orbit", "--z0", "1,0,0,1,0,0", "--t-max", "1", "--tol", "0"])), 2);
    assert_eq!(code(&run(&["orbit", "--z0", "1,0,0,1,0,0"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn orbit_unbound_start_is_usage_error() {
    assert_eq!(code(&run(&["orbit", "--z0", "1,0,0,2,0,0", "--t-max", "1"])), 2);
}

#[test]
fn verify_cnb_cases() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("cnb.json");
    let p = path.to_str().unwrap();
    assert_eq!(code(&run(&["verify-cnb", "--points", "100", "--seed", "42", "--tol", "1e-8", "--out", p])), 0);
    let report: VerificationReport = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(report.pass && report.trials == 100 && report.seed == Some(42));

    assert_eq!(code(&run(&["verify-cnb", "--points", "0", "--out", p])), 0);
    assert_eq!(read_json(&path)["trials"], 0);

    assert_eq!(code(&run(&["verify-cnb", "--points", "10", "--tol", "0", "--out", p])), 1);
    assert_eq!(read_json(&path)["pass"], false);
}

#[test]
fn verify_cnb_output_is_deterministic() {
    let a = run(&["verify-cnb", "--points", "20", "--seed", "3"]);
    let b = run(&["verify-cnb", "--points", "20", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["verify-cnb", "--points", "20", "--seed", "4"]);
    assert_ne!(a.stdout, c.stdout);
}

fn levels(value: &Value) -> Vec<(f64, f64, u64)> {
    value["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| (l["s"].as_f64().unwrap(), l["energy"].as_f64().unwrap(), l["degeneracy"].as_u64().unwrap()))
        .collect()
}

#[test]
fn spectrum_balmer_values() {
    let out = run(&["spectrum", "--smax", "1", "--hbar", "1"]);
    assert_eq!(code(&out), 0);
    let table = levels(&serde_json::from_slice(&out.stdout).unwrap());
    let expected = [(0.0, -0.5, 1), (0.5, -1.0 / 8.0, 4), (1.0, -1.0 / 18.0, 9)];
    assert_eq!(table.len(), 3);
    for ((s, e, d), (xs, xe, xd)) in table.iter().zip(expected) {
        assert_eq!((*s, *d), (xs, xd));
        assert!((e - xe).abs() < 1e-12);
    }

    let single = levels(&serde_json::from_slice(&run(&["spectrum", "--smax", "0"]).stdout).unwrap());
    assert_eq!(single.len(), 1);
    assert!((single[0].1 + 0.5).abs() < 1e-12);
}

#[test]
fn spectrum_scales_with_inverse_hbar_squared() {
    let one = levels(&serde_json::from_slice(&run(&["spectrum", "--smax", "2", "--hbar", "1"]).stdout).unwrap());
    let out = run(&["spectrum", "--smax", "2", "--hbar", "2"]);
    assert_eq!(code(&out), 0);
    let two = levels(&serde_json::from_slice(&out.stdout).unwrap());
    assert_eq!(one.len(), 5);
    for (a, b) in one.iter().zip(&two) {
        assert!((b.1 - a.1 / 4.0).abs() < 1e-12);
        assert_eq!(a.2, b.2);
    }
}

#[test]
fn spectrum_invalid_flags() {
    assert_eq!(code(&run(&["spectrum", "--smax", "0.3"])), 2);
    assert_eq!(code(&run(&["spectrum", "--smax", "1", "--hbar", "0"])), 2);
}

#[test]
fn verify_qnb_single_spin() {
    let out = run(&["verify-qnb", "--spins", "0.5", "--trials", "20", "--seed", "7"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["max_residual"].as_f64().unwrap() < 1e-10);
    assert_eq!(json["pass"], true);
    assert_eq!(json["convention_selected"], "ambiguous");
}

#[test]
fn verify_qnb_mixed_reports_each_block() {
    let out = run(&["verify-qnb", "--spins", "0.5,1", "--trials", "5"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    let reps: Vec<&str> = json["reports"].as_array().unwrap().iter().map(|r| r["rep"].as_str().unwrap()).collect();
    for label in ["[0.5]", "[1]", "[0.5,1]"] {
        assert!(reps.contains(&label), "{label} missing from {reps:?}");
    }
    assert_eq!(json["convention_selected"], "sum_over_6_orderings");
}

#[test]
fn verify_qnb_strict_mode_passes_on_compatible_problems() {
    assert_eq!(code(&run(&["verify-qnb", "--spins", "0,1/2", "--trials", "3", "--strict"])), 0);
}

#[test]
fn verify_qnb_invalid_spins() {
    assert_eq!(code(&run(&["verify-qnb", "--spins", "0.3"])), 2);
    assert_eq!(code(&run(&["verify-qnb", "--spins", ""])), 2);
    assert_eq!(code(&run(&["verify-qnb", "--spins", "-1"])), 2);
}

#[test]
fn report_to_unwritable_path_is_io_error() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("missing").join("report.json");
    let out = run(&["report", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}

#[test]
fn report_streams_schema_valid_json() {
    let out = run(&["report", "--out", "-"]);
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["schema"], 1);
    assert_eq!(json["toolchain"]["name"], "nambu-verify");
    let suites = json["suites"].as_array().unwrap();
    assert!(suites.len() >= 6);
    for s in suites {
        serde_json::from_value::<VerificationReport>(s.clone()).unwrap();
    }
    let expected = if json["pass"] == true { 0 } else { 1 };
    assert_eq!(code(&out), expected);
}
