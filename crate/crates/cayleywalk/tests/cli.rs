use std::path::Path;
use std::process::{Command, Output};

use cayleywalk_core::catalog::CATALOG;
use serde_json::Value;
use tempfile::TempDir;

fn cayleywalk(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cayleywalk"));
    cmd.args(args).env_remove("CAYLEYWALK_TOLERANCE");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn emit(dir: &Path, name: &str) -> String {
    let path = dir.join(format!("{name}.json")).to_string_lossy().into_owned();
    let o = cayleywalk(&["catalog", "emit", name, "-o", &path], &[]);
    assert_eq!(o.status.code(), Some(0), "emit {name}: {}", String::from_utf8_lossy(&o.stderr));
    path
}

/// Writes a copy of `src` with the real part of the first matrix entry
/// shifted by `delta`, and an optional file tolerance.
fn perturbed(src: &str, dst: &Path, delta: f64, tolerance: Option<f64>) -> String {
    let mut j: Value = serde_json::from_str(&std::fs::read_to_string(src).unwrap()).unwrap();
    let x = j["matrices"][0][0][0][0].as_f64().unwrap();
    j["matrices"][0][0][0][0] = Value::from(x + delta);
    match tolerance {
        Some(t) => j["tolerance"] = Value::from(t),
        None => {
            j.as_object_mut().unwrap().remove("tolerance");
        }
    }
    std::fs::write(dst, serde_json::to_vec(&j).unwrap()).unwrap();
    dst.to_string_lossy().into_owned()
}

#[test]
fn catalog_round_trip_verifies() {
    let dir = TempDir::new().unwrap();
    let mut failing = Vec::new();
    for name in CATALOG {
        let path = emit(dir.path(), name);
        let o = cayleywalk(&["walk", "verify", &path], &[]);
        if o.status.code() != Some(0) {
            failing.push(format!("{name}: {}", stdout(&o).lines().next().unwrap_or("")));
        }
    }
    assert!(failing.is_empty(), "verify fails after emit for {failing:?}");
}

#[test]
fn broken_walk_reports_constraints() {
    let dir = TempDir::new().unwrap();
    let src = emit(dir.path(), "weyl2d");
    let broken = perturbed(&src, &dir.path().join("broken.json"), 1e-3, None);
    let o = cayleywalk(&["walk", "verify", &broken], &[]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL"), "{text}");
    assert!(text.lines().count() > 1, "no per-constraint breakdown: {text}");
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"extension\": \"trivial\", \"generators\": [").unwrap();
    let o = cayleywalk(&["walk", "verify", path.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = cayleywalk(&["walk", "verify", dir.path().join("missing.json").to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = cayleywalk(&["walk", "frobnicate"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn environment_tolerance_takes_precedence() {
    let dir = TempDir::new().unwrap();
    let src = emit(dir.path(), "weyl2d");
    let plain = perturbed(&src, &dir.path().join("a.json"), 1e-6, None);
    assert_eq!(cayleywalk(&["walk", "verify", &plain], &[]).status.code(), Some(1));
    assert_eq!(cayleywalk(&["walk", "verify", &plain], &[("CAYLEYWALK_TOLERANCE", "1e-3")]).status.code(), Some(0));
    let loose = perturbed(&src, &dir.path().join("b.json"), 1e-6, Some(1e-3));
    assert_eq!(cayleywalk(&["walk", "verify", &loose], &[]).status.code(), Some(0));
    assert_eq!(cayleywalk(&["walk", "verify", &loose], &[("CAYLEYWALK_TOLERANCE", "1e-12")]).status.code(), Some(1));
    assert_eq!(cayleywalk(&["walk", "verify", &loose], &[("CAYLEYWALK_TOLERANCE", "soon")]).status.code(), Some(2));
}

#[test]
fn seeded_commands_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let w = emit(dir.path(), "dirac1d");
    let run = |args: &[&str]| {
        let o = cayleywalk(args, &[]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        o.stdout
    };
    let evolve = ["walk", "evolve", &w, "--steps", "20", "--size", "32", "--init", "random", "--seed", "5"];
    assert_eq!(run(&evolve), run(&evolve));
    let j1 = emit(dir.path(), "weyl-j1");
    let search = ["walk", "search", &j1, "--restarts", "3", "--seed", "9", "--max-iters", "2000"];
    let a = cayleywalk(&search, &[]);
    let b = cayleywalk(&search, &[]);
    assert_eq!(a.status.code(), b.status.code());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn coarse_grain_writes_provenance_sidecar() {
    let dir = TempDir::new().unwrap();
    let src = emit(dir.path(), "weyl-j2");
    let out = dir.path().join("cg.json");
    let o = cayleywalk(&["walk", "coarse-grain", &src, "-o", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let side: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("cg.provenance.json")).unwrap()).unwrap();
    // every scalar of S lands once per coset of the quotient
    assert_eq!(side["entries"].as_array().unwrap().len(), 16);
    assert_eq!(cayleywalk(&["walk", "verify", out.to_str().unwrap()], &[]).status.code(), Some(0));
}

#[test]
fn catalog_emit_records_fit_metadata() {
    let dir = TempDir::new().unwrap();
    let p = emit(dir.path(), "weyl-j2");
    let j: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
    assert_eq!(j["metadata"]["extension"], "J2");
    assert!(j["metadata"]["fit_residual"].as_f64().unwrap() < 1e-9);
    assert!(j["metadata"]["gauge_left"].is_array());
}
