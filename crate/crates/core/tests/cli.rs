use std::path::Path;
use std::process::{Command, Output};

use hopflift::fields::NodeField;
use hopflift::io::{load_h3f, load_lift, load_sphere_map, AnyField};
use serde_json::Value;

fn hopflift(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hopflift"))
        .args(args)
        .current_dir(dir)
        .env_remove("HOPFLIFT_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn selftest_passes_with_a_versioned_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = hopflift(dir.path(), &["selftest", "--n", "25"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["command"], "selftest");
    assert_eq!(doc["report"]["passed"], true);
    assert_eq!(code(&hopflift(dir.path(), &["selftest", "--n", "9"])), 64);
}

#[test]
fn hedgehog_check_reports_a_singular_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&hopflift(d, &["gen", "--map", "hedgehog", "--n", "33", "--out-prefix", "hh_"])), 0);
    let oracle = read_json(&d.join("hh_oracle.json"));
    assert_eq!(oracle["report"]["verdict"], "singular");
    let out = hopflift(d, &["check", "--in", "hh_u.h3f", "--vtk", "div.vtk"]);
    assert_eq!(code(&out), 2);
    let doc = stdout_json(&out);
    assert_eq!(doc["report"]["verdict"], "singular");
    let vtk = std::fs::read_to_string(d.join("div.vtk")).unwrap();
    assert!(vtk.contains("POINT_DATA 35937"));

    let out = hopflift(d, &["lift", "--u", "hh_u.h3f", "--eta", "hh_u.h3f", "--out", "x.h3f"]);
    assert_eq!(code(&out), 2, "a sphere map is not a gauge");
}

#[test]
fn planar_maps_check_exact() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = hopflift(d, &["gen", "--map", "planar", "--planar", "linear-winding", "--n", "17", "--out-prefix", "p_"]);
    assert_eq!(code(&gen), 0);
    let out = hopflift(d, &["check", "--in", "p_u.h3f", "--report", "r.json"]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert_eq!(read_json(&d.join("r.json"))["report"]["verdict"], "exact");
}

#[test]
fn constant_maps_lift() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = hopflift(d, &["gen", "--map", "constant", "--point", "0,-0.6,0.8", "--n", "9", "--out-prefix", "c_"]);
    assert_eq!(code(&gen), 0);
    let out = hopflift(d, &["lift", "--u", "c_u.h3f", "--eta", "c_eta.h3f", "--out", "uhat.h3f"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert!(report["report"]["gauge_error"].as_f64().unwrap() < 1e-12);
    let uhat = load_lift(&d.join("uhat.h3f")).unwrap();
    assert!(uhat.values().iter().all(|v| v == &uhat.values()[0]));
}

#[test]
fn lift_family_files_are_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = hopflift(d, &["gen", "--map", "liftfam", "--n", "17", "--a", "1,0,0", "--b", "-1,0.5,0", "--out-prefix", "f_"]);
    assert_eq!(code(&gen), 0);
    let oracle = read_json(&d.join("f_oracle.json"));
    assert_eq!(oracle["report"]["family"]["b"][0], -1.0);

    assert_eq!(code(&hopflift(d, &["project", "--in", "f_uhat.h3f", "--out", "p.h3f"])), 0);
    let u = load_sphere_map(&d.join("f_u.h3f")).unwrap();
    let p = load_sphere_map(&d.join("p.h3f")).unwrap();
    let err = u.flat().iter().zip(p.flat()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-12);

    assert_eq!(code(&hopflift(d, &["gauge-of-lift", "--in", "f_uhat.h3f", "--out", "g.h3f"])), 0);
    assert!(matches!(load_h3f(&d.join("g.h3f")).unwrap(), AnyField::Vec(_)));

    let verify = ["verify", "--u", "f_u.h3f", "--eta", "f_eta.h3f", "--uhat", "f_uhat.h3f"];
    let loose: Vec<&str> = verify.iter().copied().chain(["--tol", "0.05"]).collect();
    assert_eq!(code(&hopflift(d, &loose)), 0);
    let tight: Vec<&str> = verify.iter().copied().chain(["--tol", "1e-6"]).collect();
    assert_eq!(code(&hopflift(d, &tight)), 2);
}

#[test]
fn pullback_gauge_lift_chain() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&hopflift(d, &["gen", "--map", "liftfam", "--n", "17", "--out-prefix", "f_"])), 0);
    assert_eq!(code(&hopflift(d, &["pullback", "--in", "f_u.h3f", "--out", "D.h3f"])), 0);
    let out = hopflift(d, &["gauge", "--in", "D.h3f", "--out", "eta.h3f", "--report", "gauge.json"]);
    assert_eq!(code(&out), 0);
    assert!(read_json(&d.join("gauge.json"))["report"]["iterations"].as_u64().is_some());
    // a gauge of the wrong degree is rejected
    assert_eq!(code(&hopflift(d, &["gauge", "--in", "eta.h3f", "--out", "x.h3f"])), 2);
    // too few iterations is a solver failure
    let out = hopflift(d, &["gauge", "--in", "D.h3f", "--out", "x.h3f", "--iters", "1", "--tol", "1e-14"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn approx_and_sweep_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = hopflift(d, &["gen", "--map", "liftfam", "--n", "33", "--b", "0,2,0", "--out-prefix", "f_"]);
    assert_eq!(code(&gen), 0);
    let out = hopflift(d, &["approx", "--u", "f_u.h3f", "--eta", "f_eta.h3f", "--eps", "2h", "--out-prefix", "ap_"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["ap_u.h3f", "ap_eta.h3f", "ap_uhat.h3f"] {
        assert!(d.join(f).exists(), "{f}");
    }
    let report = stdout_json(&out);
    assert!(report["report"]["approximation"]["constraint_residual"].as_f64().unwrap() <= 5e-3);

    let out = hopflift(d, &["sweep", "--u", "f_u.h3f", "--eta", "f_eta.h3f", "--eps", "0.3,4h,2h", "--csv", "s.csv"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(d.join("s.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "eps,map_distance_w12,gauge_distance_l2,constraint_residual");
    assert_eq!(lines.len(), 4);

    let out = hopflift(d, &["sweep", "--u", "f_u.h3f", "--eta", "f_eta.h3f", "--eps", "2h,4h", "--csv", "t.csv"]);
    assert_eq!(code(&out), 2);
    let out = hopflift(d, &["approx", "--u", "f_u.h3f", "--eta", "f_eta.h3f", "--eps", "0.5", "--out-prefix", "x_"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn frame_check_respects_strict_tolerances() {
    let dir = tempfile::tempdir().unwrap();
    let out = hopflift(dir.path(), &["frame-check", "--samples", "200", "--strict"]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["report"]["samples"], 200);
    let out = hopflift(dir.path(), &["frame-check", "--samples", "200", "--tol", "0"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn usage_and_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&hopflift(d, &[])), 64);
    assert_eq!(code(&hopflift(d, &["lift", "--u", "a.h3f"])), 64);
    assert_eq!(code(&hopflift(d, &["gen", "--map", "liftfam", "--a", "1,2", "--out-prefix", "x"])), 64);
    assert_eq!(code(&hopflift(d, &["--help"])), 0);
    assert_eq!(code(&hopflift(d, &["--version"])), 0);
    assert_eq!(code(&hopflift(d, &["pullback", "--in", "missing.h3f", "--out", "x.h3f"])), 2);
    assert_eq!(code(&hopflift(d, &["gen", "--map", "liftfam", "--t0", "1.5707963267948966", "--out-prefix", "x"])), 2);
    std::fs::write(d.join("junk.h3f"), b"H3F1 3 3 S2\nshort").unwrap();
    assert_eq!(code(&hopflift(d, &["check", "--in", "junk.h3f"])), 2);
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_hopflift"))
        .args(["frame-check", "--samples", "1"])
        .env("HOPFLIFT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&bad_threads), 64);
}
