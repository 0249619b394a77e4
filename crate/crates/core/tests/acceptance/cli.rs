//! Criterion 10 helper: drive the `headkin` binary through a full
//! synthesize → reconstruct → evaluate chain on noise-free impacts and
//! verify the evaluation report plus lossless file round trips.

use headband_kinematics::io::{read_recording, ComparisonReport, RunConfig};
use headband_kinematics::synth::{synthesize_impact, SyntheticScenario};
use headband_kinematics::PipelineConfig;
use std::path::Path;
use std::process::Command;

fn headkin(dir: &Path, args: &[&str]) -> Result<String, String> {
    let output = Command::new(env!("CARGO_BIN_EXE_headkin"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| format!("could not launch headkin: {e}"))?;
    if !output.status.success() {
        return Err(format!(
            "headkin {} failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&output.stderr)
        ));
    }
    Ok(String::from_utf8_lossy(&output.stdout).into_owned())
}

fn scenario_with_amplitude(amplitude: f64) -> SyntheticScenario {
    SyntheticScenario {
        pulse_amplitude: amplitude,
        noise_amplitude: 0.0,
        gyro_noise_sd: 0.0,
        ..SyntheticScenario::default()
    }
}

pub fn round_trip() -> Result<String, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    let impacts = dir.join("impacts");
    std::fs::create_dir_all(&impacts).map_err(|e| e.to_string())?;

    let cases = [("a", 6.0), ("b", 10.0), ("c", 16.0)];
    for (label, amplitude) in cases {
        let config = RunConfig {
            pipeline: PipelineConfig::default(),
            sensors: Vec::new(),
            scenario: Some(scenario_with_amplitude(amplitude)),
        };
        let cfg_path = dir.join(format!("{label}.toml"));
        config.save(&cfg_path).map_err(|e| e.to_string())?;
        headkin(
            dir,
            &[
                "--config",
                &format!("{label}.toml"),
                "synth",
                "--out-dir",
                label,
                "--seed",
                "0",
            ],
        )?;
        std::fs::copy(
            dir.join(label).join("recording.csv"),
            impacts.join(format!("{label}.csv")),
        )
        .map_err(|e| e.to_string())?;
    }

    // the recording file reproduces the in-memory record exactly
    let run = RunConfig::load(dir.join("b/run.toml")).map_err(|e| e.to_string())?;
    let mounts = run.mounts().map_err(|e| e.to_string())?;
    let reread = read_recording(dir.join("b/recording.csv"), &mounts).map_err(|e| e.to_string())?;
    let (original, _) = synthesize_impact(&scenario_with_amplitude(10.0), 0).unwrap();
    if reread.trigger_time != original.trigger_time {
        return Err("trigger time did not survive the CSV round trip".into());
    }
    for (a, b) in original.sensors.iter().zip(&reread.sensors) {
        if a.gyro != b.gyro || a.accel_low != b.accel_low || a.accel_high != b.accel_high {
            return Err(format!("sensor {} changed in the CSV round trip", a.mount.sensor_id));
        }
    }

    headkin(
        dir,
        &[
            "--config",
            "b/run.toml",
            "reconstruct",
            "impacts/a.csv",
            "impacts/b.csv",
            "impacts/c.csv",
            "--out",
            "recon.json",
            "--kinematics-dir",
            "kin",
        ],
    )?;

    let mut manifest = String::from("label,location,headband_csv,reference_csv\n");
    for (label, _) in cases {
        manifest.push_str(&format!(
            "{label},front,kin/{label}.kinematics.csv,{label}/truth.csv\n"
        ));
    }
    std::fs::write(dir.join("manifest.csv"), manifest).map_err(|e| e.to_string())?;
    headkin(
        dir,
        &[
            "evaluate",
            "--manifest",
            "manifest.csv",
            "--out",
            "eval.json",
            "--decisions",
            "recon.json",
        ],
    )?;

    let report = ComparisonReport::load(dir.join("eval.json")).map_err(|e| e.to_string())?;
    let overall = report.overall.as_ref().ok_or("report has no overall block")?;
    if overall.n != 3 {
        return Err(format!("expected 3 impacts, report has {}", overall.n));
    }
    let prv_nrmse = overall.prv.nrmse.ok_or("PRV NRMSE missing")?;
    if prv_nrmse >= 0.02 {
        return Err(format!("PRV NRMSE {prv_nrmse:.4}, expected < 0.02"));
    }
    let ba = overall.prv.bland_altman.as_ref().ok_or("PRV bias missing")?;
    if ba.mean_bias.abs() >= 0.01 {
        return Err(format!("PRV bias {:.4}, expected within ±0.01", ba.mean_bias));
    }
    for impact in &report.impacts {
        let decision = impact
            .decision
            .as_ref()
            .ok_or_else(|| format!("impact {} lost its filter decision", impact.label))?;
        if decision.f_0 > 180.0 {
            return Err(format!("impact {} cutoff {} Hz above the cap", impact.label, decision.f_0));
        }
        let cora = impact
            .cora
            .as_ref()
            .ok_or_else(|| format!("impact {} has no curve rating", impact.label))?;
        if cora.score < 0.7 {
            return Err(format!("impact {} curve rating {:.2}", impact.label, cora.score));
        }
    }

    // the JSON report reloads and rewrites byte for byte
    let rewritten = dir.join("eval2.json");
    report.save(&rewritten).map_err(|e| e.to_string())?;
    let first = std::fs::read(dir.join("eval.json")).map_err(|e| e.to_string())?;
    let second = std::fs::read(&rewritten).map_err(|e| e.to_string())?;
    if first != second {
        return Err("reloaded report serialized differently".into());
    }

    Ok(format!(
        "3 impacts; PRV NRMSE {:.4}, bias {:.4}; recording and report round trips lossless",
        prv_nrmse, ba.mean_bias
    ))
}
