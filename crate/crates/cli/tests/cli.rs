use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn hyperxray(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperxray")).args(args).output().expect("binary runs")
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn rows(path: &str) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn phantom_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (p(&dir, "a.csv"), p(&dir, "b.csv"));
    for f in [&a, &b] {
        let out = hyperxray(&["phantom", "random:4", "--seed", "7", "--gamma", "0.5", "--out", f]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = p(&dir, "c.csv");
    hyperxray(&["phantom", "random:4", "--seed", "8", "--gamma", "0.5", "--out", &c]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn forward_then_reconstruct_recovers_the_phantom() {
    let dir = TempDir::new().unwrap();
    let (truth, data, rec) = (p(&dir, "p.csv"), p(&dir, "u.csv"), p(&dir, "r.csv"));
    assert!(hyperxray(&["phantom", "zernike:2,1", "--gamma", "-0.5", "--out", &truth]).status.success());

    let out = hyperxray(&["forward", "zernike:2,1", "--gamma", "-0.5", "--out", &data]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json_stdout(&out);
    assert!(summary["singular_triple"]["residual"].as_f64().unwrap() < 1e-6);

    let out = hyperxray(&["reconstruct", "--in", &data, "--truth", &truth, "--gamma", "-0.5", "--out", &rec]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json_stdout(&out);
    assert!(summary["relative_l2_error"].as_f64().unwrap() < 1e-6, "{summary}");
    assert_eq!(summary["out_of_range"].as_array().unwrap().len(), 0);
}

#[test]
fn gamma_mismatch_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let data = p(&dir, "u.csv");
    assert!(hyperxray(&["forward", "zernike:0,0", "--gamma", "0", "--out", &data]).status.success());
    let out = hyperxray(&["reconstruct", "--in", &data, "--gamma", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn backprojection_of_a_constant_is_two_pi() {
    let dir = TempDir::new().unwrap();
    let (c, b) = (p(&dir, "c.csv"), p(&dir, "b.csv"));
    assert!(hyperxray(&["phantom", "data-const:1", "--out", &c]).status.success());
    let out = hyperxray(&["backproject", "--in", &c, "--interp", "raw", "--out", &b]);
    assert!(out.status.success());
    for r in rows(&b) {
        assert!((r[2] - std::f64::consts::TAU).abs() < 1e-10, "{r:?}");
        assert!(r[3].abs() < 1e-10);
    }
}

#[test]
fn range_check_accepts_forward_data_and_flags_kernel_data() {
    let dir = TempDir::new().unwrap();
    let (good, bad) = (p(&dir, "good.csv"), p(&dir, "bad.csv"));
    assert!(hyperxray(&["forward", "random:5", "--seed", "3", "--gamma", "0", "--out", &good]).status.success());
    let out = hyperxray(&["range-check", "--in", &good]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json_stdout(&out)["all_passed"], Value::Bool(true));

    assert!(hyperxray(&["phantom", "data-psi:2,3", "--gamma", "0", "--out", &bad]).status.success());
    let out = hyperxray(&["range-check", "--in", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let report = json_stdout(&out);
    assert_eq!(report["all_passed"], Value::Bool(false));
    let moments = &report["criteria"][0];
    assert_eq!(moments["name"], "moments");
    assert!(!moments["offending"].as_array().unwrap().is_empty());
}

#[test]
fn range_check_notes_the_omitted_boundary_criterion_off_gamma_zero() {
    let dir = TempDir::new().unwrap();
    let data = p(&dir, "u.csv");
    assert!(hyperxray(&["forward", "zernike:3,2", "--gamma", "1", "--out", &data]).status.success());
    let out = hyperxray(&["range-check", "--in", &data]);
    assert!(out.status.success());
    let report = json_stdout(&out);
    let c = report["criteria"].as_array().unwrap().iter().find(|c| c["name"] == "c_minus").unwrap();
    assert!(c["note"].is_string());
}

#[test]
fn spectrum_of_a_single_function_has_one_peak() {
    let dir = TempDir::new().unwrap();
    let data = p(&dir, "u.csv");
    assert!(hyperxray(&["forward", "zernike:3,1", "--gamma", "0", "--out", &data]).status.success());
    let out = hyperxray(&["spectrum", "--in", &data]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut big = Vec::new();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f[4].parse::<f64>().unwrap() > 1e-8 {
            big.push((f[0].to_string(), f[1].to_string()));
        }
    }
    assert_eq!(big, vec![("3".to_string(), "1".to_string())]);
}

#[test]
fn pgm_output_has_a_p5_header() {
    let dir = TempDir::new().unwrap();
    let img = p(&dir, "p.pgm");
    assert!(hyperxray(&["phantom", "bump:0.5,0.2", "--grid", "32x8", "--format", "pgm", "--out", &img])
        .status
        .success());
    let bytes = std::fs::read(&img).unwrap();
    assert!(bytes.starts_with(b"P5\n8 32\n255\n"));
    assert_eq!(bytes.len(), "P5\n8 32\n255\n".len() + 256);
}

#[test]
fn selftest_subset_reports_json() {
    let dir = TempDir::new().unwrap();
    let report = p(&dir, "st.json");
    let out = hyperxray(&["selftest", "--only", "cosphere,santalo", "--gamma", "0", "--out", &report]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["all_passed"], Value::Bool(true));
    assert!(v["checks"].as_array().unwrap().len() >= 3);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.lines().any(|l| l.starts_with("PASS [9]")));
}

#[test]
fn bad_inputs_exit_with_code_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(hyperxray(&["forward", "bogus:1"]).status.code(), Some(2));
    assert_eq!(hyperxray(&["phantom", "zernike:2,5"]).status.code(), Some(2));
    assert_eq!(hyperxray(&["phantom", "zernike:0,0", "--gamma", "-1.5"]).status.code(), Some(2));

    let bad = p(&dir, "bad.csv");
    std::fs::write(&bad, "{\"schema_version\":\"9\",\"space\":\"data\",\"gamma\":0.0,\"nodes\":[1,1],\"convention\":\"x\"}\ni,j,re,im\n0,0,1,0\n").unwrap();
    assert_eq!(hyperxray(&["range-check", "--in", &bad]).status.code(), Some(2));
    assert!(!Path::new(&p(&dir, "missing.csv")).exists());
    assert_eq!(hyperxray(&["spectrum", "--in", &p(&dir, "missing.csv")]).status.code(), Some(2));
}

#[test]
fn grid_files_survive_a_round_trip() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (p(&dir, "a.csv"), p(&dir, "b.csv"));
    assert!(hyperxray(&["forward", "random:3", "--seed", "1", "--gamma", "0.25", "--out", &a]).status.success());
    // Reconstruct-then-forward of band-limited data is the identity on the samples.
    let r = p(&dir, "r.csv");
    assert!(hyperxray(&["reconstruct", "--in", &a, "--gamma", "0.25", "--out", &r]).status.success());
    assert!(hyperxray(&["forward", "--in", &r, "--gamma", "0.25", "--out", &b]).status.success());
    let (ra, rb) = (rows(&a), rows(&b));
    assert_eq!(ra.len(), rb.len());
    let err = ra.iter().zip(&rb).map(|(x, y)| (x[2] - y[2]).abs() + (x[3] - y[3]).abs()).fold(0.0, f64::max);
    assert!(err < 1e-8, "{err}");
    let header_a = std::fs::read_to_string(&a).unwrap().lines().next().unwrap().to_string();
    let header: Value = serde_json::from_str(&header_a).unwrap();
    assert_eq!(header["schema_version"], "1");
    assert_eq!(header["space"], "data");
}
