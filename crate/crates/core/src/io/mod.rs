//! File formats: recording CSV, TOML run configuration, JSON reports and
//! scalogram CSV/SVG export.
//!
//! A recording is one CSV per impact with the header
//! `sensor_id,channel,t,x,y,z` (`channel` ∈ {`gyro`, `accel_lo`, `accel_hi`}),
//! optionally preceded by `#`-comment metadata lines carrying the recorded
//! trigger time and impact location. Sensor mounts travel in the sidecar TOML
//! configuration as `[[sensor]]` tables (nine row-major rotation entries plus
//! a position angle), so the CSV stays self-contained sample data.
//!
//! Floats are written with Rust's shortest round-trip formatting, so
//! serialize-then-parse reproduces every value bit-exactly.

mod recording;
mod report;
mod scalogram;

pub use recording::{
    read_recording, read_scalar_csv, read_vec3_csv, write_recording, write_vec3_csv,
};
pub use report::{
    AggregateStats, ComparisonReport, ImpactComparison, ReconstructedImpact,
    ReconstructionReport, StatBlock, SCHEMA_VERSION,
};
pub use scalogram::{write_scalogram_csv, write_scalogram_svg};

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::fusion::SensorMount;
use crate::synth::SyntheticScenario;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// One `[[sensor]]` table of the run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorConfigEntry {
    pub id: String,
    /// Row-major 3×3 rotation taking sensor-frame vectors to the head frame.
    pub rotation: [f64; 9],
    /// Angular position around the head, degrees.
    pub position_angle: f64,
}

impl SensorConfigEntry {
    pub fn to_mount(&self) -> Result<SensorMount> {
        let r = &self.rotation;
        SensorMount::new(
            self.id.clone(),
            [
                [r[0], r[1], r[2]],
                [r[3], r[4], r[5]],
                [r[6], r[7], r[8]],
            ],
            self.position_angle,
        )
    }

    pub fn from_mount(mount: &SensorMount) -> Self {
        let r = &mount.rotation;
        Self {
            id: mount.sensor_id.clone(),
            rotation: [
                r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2],
            ],
            position_angle: mount.position_angle_deg,
        }
    }
}

/// Top-level TOML document: pipeline settings, sensor mounts and (optionally)
/// a synthetic scenario.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub pipeline: PipelineConfig,
    #[serde(rename = "sensor")]
    pub sensors: Vec<SensorConfigEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<SyntheticScenario>,
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let config: RunConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = toml::to_string_pretty(self)
            .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
        std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn validate(&self) -> Result<()> {
        self.pipeline.validate()?;
        if let Some(scenario) = &self.scenario {
            scenario.validate()?;
        }
        for entry in &self.sensors {
            entry.to_mount()?;
        }
        Ok(())
    }

    pub fn mounts(&self) -> Result<Vec<SensorMount>> {
        self.sensors.iter().map(SensorConfigEntry::to_mount).collect()
    }
}
