//! Black-box tests of the `headkin` binary: exit codes, error messages and
//! the auxiliary subcommands not covered by the acceptance round trip.

use std::path::Path;
use std::process::{Command, Output};

fn headkin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_headkin"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary launches")
}

#[test]
fn missing_input_fails_with_the_path_in_the_message() {
    let tmp = tempfile::tempdir().unwrap();
    // a synth run provides a config with valid mounts
    assert!(headkin(tmp.path(), &["synth", "--out-dir", "impact"]).status.success());
    let out = headkin(
        tmp.path(),
        &[
            "--config",
            "impact/run.toml",
            "reconstruct",
            "no-such-recording.csv",
            "--out",
            "report.json",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("error:"), "stderr: {stderr}");
    assert!(stderr.contains("no-such-recording.csv"), "stderr: {stderr}");
}

#[test]
fn reconstruct_without_mounts_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("r.csv"), "t,gyro_x\n").unwrap();
    let out = headkin(tmp.path(), &["reconstruct", "r.csv", "--out", "report.json"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("sensor"), "stderr: {stderr}");
}

#[test]
fn bad_manifest_header_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("m.csv"), "name,place,a,b\nx,front,a.csv,b.csv\n").unwrap();
    let out = headkin(
        tmp.path(),
        &["evaluate", "--manifest", "m.csv", "--out", "report.json"],
    );
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("label,location,headband_csv,reference_csv"), "stderr: {stderr}");
}

#[test]
fn unknown_filter_mode_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("r.csv"), "x\n").unwrap();
    let out = headkin(
        tmp.path(),
        &["reconstruct", "r.csv", "--out", "report.json", "--mode", "sideways"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sideways"));
}

#[test]
fn synth_is_deterministic_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    for dir in ["one", "two"] {
        let out = headkin(tmp.path(), &["synth", "--out-dir", dir, "--seed", "7"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(tmp.path().join("one/recording.csv")).unwrap();
    let b = std::fs::read(tmp.path().join("two/recording.csv")).unwrap();
    assert_eq!(a, b, "identical seeds must produce identical recordings");
    let other = headkin(tmp.path(), &["synth", "--out-dir", "three", "--seed", "8"]);
    assert!(other.status.success());
    let c = std::fs::read(tmp.path().join("three/recording.csv")).unwrap();
    assert_ne!(a, c, "different seeds must produce different noise");
}

#[test]
fn synth_reconstruct_works_in_causal_mode() {
    let tmp = tempfile::tempdir().unwrap();
    let out = headkin(tmp.path(), &["synth", "--out-dir", "impact", "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = headkin(
        tmp.path(),
        &[
            "--config",
            "impact/run.toml",
            "reconstruct",
            "impact/recording.csv",
            "--out",
            "report.json",
            "--mode",
            "causal",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PRV"), "stdout: {stdout}");
    assert!(tmp.path().join("recording.kinematics.csv").exists());
    assert!(tmp.path().join("report.json").exists());
}

#[test]
fn scalogram_exports_csv_and_svg() {
    let tmp = tempfile::tempdir().unwrap();
    let fs = 1125.0;
    let mut csv = String::from("t,value\n");
    for k in 0..400 {
        let t = k as f64 / fs;
        csv.push_str(&format!("{t},{}\n", (2.0 * std::f64::consts::PI * 30.0 * t).sin()));
    }
    std::fs::write(tmp.path().join("tone.csv"), csv).unwrap();
    let out = headkin(tmp.path(), &["scalogram", "tone.csv", "--out", "tone-map"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let matrix = std::fs::read_to_string(tmp.path().join("tone-map.csv")).unwrap();
    assert!(matrix.starts_with("frequency_hz,"), "header: {}", &matrix[..40]);
    let svg = std::fs::read_to_string(tmp.path().join("tone-map.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.contains("<svg"), "not an SVG");
    assert!(svg.contains("frequency"), "missing axis label");
}
