use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn specband(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specband")).args(args).output().expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, a: &[f64], b: &[f64]) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::json!({ "a": a, "b": b }).to_string()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn spectrum_of_ssh() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "ssh.json", &[1.0, 2.0], &[0.0, 0.0]);
    let out = specband(&["spectrum", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let bands = v["bands"].as_array().unwrap();
    let pairs: Vec<(f64, f64)> = bands.iter().map(|b| (b["lo"].as_f64().unwrap(), b["hi"].as_f64().unwrap())).collect();
    assert_eq!(pairs.len(), 2);
    for ((lo, hi), (want_lo, want_hi)) in pairs.iter().zip([(-3.0, -1.0), (1.0, 3.0)]) {
        assert!((lo - want_lo).abs() < 1e-10 && (hi - want_hi).abs() < 1e-10);
    }
    let eig = &v["eigenvalues"][0];
    assert!(eig["value"].as_f64().unwrap().abs() < 1e-10);
    assert!((eig["weight"].as_f64().unwrap() - 0.75).abs() < 1e-8);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn validate_laplacian_passes() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "lap.json", &[1.0], &[0.0]);
    let out = specband(&["validate", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("0 failed"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn decay_fit_rejects_nonpositive_norms() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "lap.json", &[1.0], &[0.0]);
    let csv = dir.path().join("zeros.csv");
    let mut text = String::from("t,n,re_psi,im_psi,abs_psi\n");
    for i in 0..10 {
        let t = 20.0 * 1.5f64.powi(i);
        for n in 1..=(2.0 * t) as usize + 2 {
            text.push_str(&format!("{t},{n},0,0,0\n"));
        }
    }
    std::fs::write(&csv, format!("# support=1\n{text}")).unwrap();
    let out = specband(&["decay-fit", "--input", s(&csv), "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not positive"));
}

#[test]
fn evolve_round_trips_into_decay_fit() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "ssh.json", &[1.0, 2.0], &[0.0, 0.0]);
    let csv = dir.path().join("run.csv");
    let out =
        specband(&["evolve", "--config", s(&cfg), "--out", s(&csv), "--times", "geometric:20,200,10", "--emit-plot"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config_hash="));
    assert_eq!(lines.next().unwrap(), "t,n,re_psi,im_psi,abs_psi");
    assert!(!text.contains('\r'));
    assert!(std::fs::read_to_string(dir.path().join("run.svg")).unwrap().starts_with("<svg"));

    let fit = specband(&["decay-fit", "--input", s(&csv), "--config", s(&cfg), "--norm", "l2", "--norm", "sup"]);
    assert_eq!(fit.status.code(), Some(0), "{}", String::from_utf8_lossy(&fit.stderr));
    let v: Value = serde_json::from_slice(&fit.stdout).unwrap();
    let fits = v.as_array().unwrap();
    assert_eq!(fits.len(), 2);
    assert_eq!(fits[0]["kind"], "l2");
    assert!(fits[0]["slope"].as_f64().unwrap().abs() < 1e-8);
    assert_eq!(fits[0]["pass"], true);
    assert_eq!(fits[1]["kind"], "sup");
    for key in ["slope", "ci", "predicted", "pass"] {
        assert!(!fits[1][key].is_null(), "{key}");
    }

    // a different operator is refused
    let other = write_config(&dir, "lap.json", &[1.0], &[0.0]);
    let out = specband(&["decay-fit", "--input", s(&csv), "--config", s(&other)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn both_methods_agree() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "q3.json", &[0.9, 1.3, 1.1], &[0.2, -0.4, 0.1]);
    let csv = dir.path().join("both.csv");
    let out =
        specband(&["evolve", "--config", s(&cfg), "--out", s(&csv), "--times", "list:1,10,30", "--method", "both"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let oracle = std::fs::read_to_string(dir.path().join("both.oracle.csv")).unwrap();
    assert!(oracle.lines().next().unwrap().contains("method=oracle"));
}

#[test]
fn measure_writes_density_and_masses() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "ssh.json", &[1.0, 2.0], &[0.0, 0.0]);
    let csv = dir.path().join("density.csv");
    let out = specband(&["measure", "--config", s(&cfg), "--out", s(&csv), "--grid", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().nth(1), Some("x,band_index,w"));
    assert_eq!(text.lines().count(), 2 + 22);
    let masses: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("density.masses.json")).unwrap()).unwrap();
    assert!((masses["total_mass"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!((masses["masses"][0]["weight"].as_f64().unwrap() - 0.75).abs() < 1e-8);
}

#[test]
fn audit_reports_classification() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "lap.json", &[1.0], &[0.0]);
    let out = specband(&["audit", "--config", s(&cfg)]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["global_class"], "nondegenerate");
    assert_eq!(v["nondegenerate"], true);
    assert!((v["bands"][0]["t2"][0].as_f64().unwrap() + std::f64::consts::FRAC_PI_2).abs() < 1e-8);
}

#[test]
fn outputs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "q2.json", &[0.7, 1.2], &[0.3, -0.1]);
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_specband"))
            .args(["evolve", "--config", s(&cfg), "--out", s(&path), "--times", "list:5,50"])
            .env("SPECBAND_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.csv", "1"), run("b.csv", "4"));
}

#[test]
fn error_exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(specband(&[]).status.code(), Some(2));
    assert_eq!(specband(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(specband(&["--help"]).status.code(), Some(0));
    let missing = dir.path().join("missing.json");
    assert_eq!(specband(&["spectrum", "--config", s(&missing)]).status.code(), Some(2));
    let bad = write_config(&dir, "bad.json", &[1.0, -1.0], &[0.0, 0.0]);
    let out = specband(&["spectrum", "--config", s(&bad)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not strictly positive"));
    let ok = write_config(&dir, "lap.json", &[1.0], &[0.0]);
    let out = Command::new(env!("CARGO_BIN_EXE_specband"))
        .args(["spectrum", "--config", s(&ok)])
        .env("SPECBAND_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out =
        specband(&["evolve", "--config", s(&ok), "--out", s(&dir.path().join("x.csv")), "--times", "geometric:0,1,3"]);
    assert_eq!(out.status.code(), Some(2));
}
