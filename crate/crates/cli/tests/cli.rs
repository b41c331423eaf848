//! Black-box tests of the `chronoshell` binary: exit codes, artifact layout,
//! and byte-level determinism of repeated runs.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chronoshell"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const TYPICALITY_CONFIG: &str = r#"{
  "clock": { "kind": "exponential", "beta": 1.0, "nu0": 50.0, "top_level": 1300, "period": 12000.0 },
  "system_levels": [0.0, 1.0],
  "shell": { "energy": 3.0, "delta": 0.1 },
  "seed": 0,
  "census": { "samples": 50, "beta_ref": 1.0 }
}"#;

#[test]
fn identity_check_small_clock() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "id.json",
        r#"{
          "clock": { "kind": "explicit", "grid_indices": [0, 1, 2], "period": 6.283185307179586 },
          "grid": { "t0": 0.0, "samples": 4 }
        }"#,
    );
    let out = tmp.path().join("run");
    let status = bin()
        .args(["identity-check", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("identity.csv")).unwrap();
    assert!(csv.starts_with("check,value\n"));
    let residual: f64 = csv
        .lines()
        .find(|l| l.starts_with("identity_residual,"))
        .and_then(|l| l.split(',').nth(1))
        .unwrap()
        .parse()
        .unwrap();
    assert!(residual <= 1e-12);
    assert!(out.join("manifest.json").exists());
}

#[test]
fn aliased_grid_fails_with_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "aliased.json",
        r#"{
          "clock": { "kind": "explicit", "grid_indices": [0, 8], "period": 6.283185307179586 },
          "grid": { "t0": 0.0, "samples": 8 }
        }"#,
    );
    let output = bin()
        .args(["identity-check", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(tmp.path().join("run"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("identity_residual"), "stderr: {stderr}");
}

#[test]
fn invalid_config_fails_with_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    // duplicate grid index: the clock itself is invalid
    let config = write_config(
        tmp.path(),
        "bad.json",
        r#"{ "clock": { "kind": "explicit", "grid_indices": [0, 3, 3], "period": 1.0 } }"#,
    );
    let output = bin()
        .args(["identity-check", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(tmp.path().join("run"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("invalid config"));

    let missing = bin()
        .args(["typicality", "--config"])
        .arg(tmp.path().join("nope.json"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn typicality_runs_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "census.json", TYPICALITY_CONFIG);
    let mut bodies = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let status = bin()
            .args(["typicality", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        bodies.push((
            std::fs::read(out.join("census.csv")).unwrap(),
            std::fs::read(out.join("summary.json")).unwrap(),
            std::fs::read(out.join("manifest.json")).unwrap(),
        ));
    }
    assert_eq!(bodies[0], bodies[1], "repeated runs must be byte-identical");

    let summary: serde_json::Value =
        serde_json::from_slice(&bodies[0].1).expect("summary is valid JSON");
    assert!(summary["mean_dist_omega"].as_f64().unwrap() <= 0.1);

    // a different seed changes the data
    let out = tmp.path().join("c");
    let status = bin()
        .args(["typicality", "--seed", "999", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert_ne!(std::fs::read(out.join("census.csv")).unwrap(), bodies[0].0);
}

#[test]
fn dynamics_toy_and_gppt_emit_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "dyn.json",
        r#"{
          "clock": { "kind": "explicit",
                     "grid_indices": [0, 1590, 1592, 1594, 1596, 1598, 1790, 1792, 1794, 1796, 1798],
                     "period": 1256.6370614359172 },
          "system_levels": [0.0, 1.0],
          "shell": { "energy": 8.9499, "delta": 0.0501 },
          "seed": 3,
          "sweep": { "t_start": -2.0, "t_end": 2.0, "steps": 21 },
          "oscillator": { "mass": 1.0, "omega": 1.0 },
          "probes": { "times": [0.0, 0.5, 1.0] }
        }"#,
    );
    for (cmd, artifact) in [
        ("dynamics", "dynamics.csv"),
        ("toy", "toy.csv"),
        ("gppt", "probabilities.csv"),
    ] {
        let out = tmp.path().join(cmd);
        let status = bin()
            .args([cmd, "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success(), "{cmd} failed");
        let body = std::fs::read_to_string(out.join(artifact)).unwrap();
        assert!(body.lines().count() > 1, "{artifact} has data rows");
        let manifest: serde_json::Value =
            serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["command"], cmd);
        assert_eq!(manifest["outputs"][0]["path"], artifact);
        let hash = manifest["outputs"][0]["sha256"].as_str().unwrap();
        assert_eq!(hash.len(), 64);
    }
}

#[test]
fn cosmo_prints_reference_bound() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("cosmo");
    let output = bin()
        .args(["cosmo", "--T", "4.35e17", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("1.5"), "stdout: {stdout}");
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("cosmo.json")).unwrap()).unwrap();
    let bound = summary["bound_joules"].as_f64().unwrap();
    assert!((bound - 1.5e-51).abs() <= 0.05 * 1.5e-51);

    let bad = bin().args(["cosmo", "--T", "-1.0"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
