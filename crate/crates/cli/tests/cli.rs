use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slehydro"))
        .args(args)
        .env_remove("SLEHYDRO_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Data rows (after the comment header and the column line) split on commas.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn single_hull_csv() {
    let csv = stdout(&["hull", "--source", "single", "--t", "1", "--samples", "512", "--format", "csv"]);
    assert!(csv.starts_with("# slehydro "));
    assert!(csv.lines().any(|l| l == "phi,re,im"));
    let r = rows(&csv);
    assert_eq!(r.len(), 512);
    // Even sample count: the apex row sits half a step from phi = 0.
    let top = r.iter().map(|row| f(&row[2])).fold(0.0, f64::max);
    assert!((top - 1.2131).abs() < 1e-4);
    assert!((f(&r[511][1]) - 2.0 * std::f64::consts::E.sqrt()).abs() < 1e-12);
}

#[test]
fn critical_two_source_hull_touches_axis() {
    let csv = stdout(&["hull", "--source", "two", "--a", "1", "--t", "0.25", "--samples", "256"]);
    let r = rows(&csv);
    let pts: Vec<(f64, f64)> = r.iter().map(|row| (f(&row[2]), f(&row[3]))).collect();
    let xc = 2.287_793_704_254_242_7;
    assert!((pts[0].0 + xc).abs() < 1e-9 && pts[0].1 == 0.0);
    assert!((pts[pts.len() - 1].0 - xc).abs() < 1e-9);
    let mid = pts[pts.len() / 2];
    assert!(mid.0.abs() < 1e-3 && mid.1 < 1e-3);
}

#[test]
fn degenerate_hull_at_time_zero() {
    let r = rows(&stdout(&["hull", "--source", "single", "--t", "0"]));
    assert_eq!(r.len(), 1);
    assert_eq!(f(&r[0][1]), 0.0);
    assert_eq!(f(&r[0][2]), 0.0);
}

#[test]
fn density_at_origin() {
    let r = rows(&stdout(&["density", "--source", "single", "--t", "1", "--u", "0"]));
    assert!((f(&r[0][1]) - 0.159154).abs() < 1e-6);
}

#[test]
fn density_reports_support_for_custom_atoms() {
    let csv = stdout(&["density", "--source", "atoms", "--atoms", "-1:1,1:1", "--t", "0.1", "--points", "201"]);
    let support = csv.lines().find(|l| l.starts_with("# support:")).unwrap();
    let v: serde_json::Value = serde_json::from_str(support.trim_start_matches("# support:").trim()).unwrap();
    // Well before the merge the support has two pieces.
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn asymptote_decays_like_inverse_time() {
    let csv = stdout(&["asymptote", "--source", "two", "--a", "1", "--t-list", "2,4,8,16,32"]);
    let line = csv.lines().find(|l| l.starts_with("# fitted_exponent:")).unwrap();
    let e = f(line.trim_start_matches("# fitted_exponent:").trim());
    assert!((e + 1.0).abs() <= 0.2, "{e}");
    let d: Vec<f64> = rows(&csv).iter().map(|r| f(&r[1])).collect();
    assert!(d.windows(2).all(|p| p[1] < p[0]));
}

#[test]
fn gmap_marks_hull_interior() {
    let csv = stdout(&["gmap", "--source", "single", "--t", "1", "--grid", "-0.1,0.1,0.1,3.0,1,2"]);
    let r = rows(&csv);
    assert_eq!(r[0][4], "1");
    assert_eq!(r[0][2], "nan");
    assert_eq!(r[1][4], "0");
}

#[test]
fn json_carries_schema_and_config() {
    let out = stdout(&["density", "--t", "1", "--u", "0,1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "slehydro/density/v1");
    assert_eq!(v["config"]["t"], 1.0);
    assert_eq!(v["data"]["rho"].as_array().unwrap().len(), 2);
}

#[test]
fn simulate_is_reproducible_and_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let args = ["simulate", "--n", "10", "--dt", "0.01", "--t", "0.5", "--seed", "7", "-o", a.to_str().unwrap()];
    // The config header records the output path, so rerun onto the same file.
    assert!(run(&args).status.success());
    let sa = std::fs::read_to_string(&a).unwrap();
    assert!(run(&args).status.success());
    assert_eq!(sa, std::fs::read_to_string(&a).unwrap());
    let r = rows(&sa);
    assert_eq!(r.len(), 51);
    assert_eq!(r[0].len(), 12);
    // No temp files are left behind.
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn one_file_per_time() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("hull.svg");
    let out = run(&["hull", "--source", "two", "--t", "0.1,0.5", "--samples", "32", "--format", "svg", "-o", base.to_str().unwrap()]);
    assert!(out.status.success());
    for tag in ["t0.1", "t0.5"] {
        let s = std::fs::read_to_string(dir.path().join(format!("hull_{tag}.svg"))).unwrap();
        assert!(s.contains("viewBox=\"0 0 800 400\"") && s.contains("<path"));
    }
}

#[test]
fn converge_writes_table_and_raster() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("cv.csv");
    let out = run(&["converge", "--n-list", "10,20", "--seeds", "2", "--raster", "10,5", "-o", base.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(rows(&std::fs::read_to_string(&base).unwrap()).len(), 2);
    assert_eq!(rows(&std::fs::read_to_string(Path::new(&dir.path().join("cv_raster.csv"))).unwrap()).len(), 50);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["simulate", "--kappa", "5"]).status.code(), Some(2));
    assert_eq!(run(&["density", "--t", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["hull", "--source", "atoms"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["gmap", "--format", "svg"]).status.code(), Some(2));
    // A zero-width grid of atoms that coincide is a config error, not a crash.
    assert_eq!(run(&["hull", "--source", "atoms", "--atoms", "0:1,0:1"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exit_code() {
    // Two atoms 1e-12 apart at t = 1e-30: the solver cannot resolve the hull.
    let out = run(&["hull", "--source", "atoms", "--atoms", "0:1,1e-12:1", "--t", "1e-30", "--samples", "8"]);
    assert_eq!(out.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("solve_mt") && msg.contains("residual"), "{msg}");
}

#[test]
fn thread_cap_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_slehydro"))
        .args(["density", "--u", "0"])
        .env("SLEHYDRO_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_slehydro"))
        .args(["density", "--u", "0"])
        .env("SLEHYDRO_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
}
