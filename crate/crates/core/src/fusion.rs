//! Sensor-array fusion: frame alignment, trigger detection and averaging.
//!
//! Each headband sensor reports angular velocity in its own frame. The
//! streams are rotated into the shared head frame and averaged; with the
//! rigid motion common to every sensor and the deformation vibrations local
//! to each, averaging suppresses the local contributions by roughly sqrt(N).

use crate::error::{Error, Result};
use crate::series::Vec3Series;
use serde::{Deserialize, Serialize};

/// Standard gravity used for g-threshold conversions.
pub const GRAVITY: f64 = 9.81;

/// Orthonormality tolerance for mount rotations.
const ROTATION_TOL: f64 = 1e-9;

/// Impact location label from the test protocol.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImpactLocation {
    Front,
    FrontSide,
    Side,
    BackSide,
    Back,
    #[default]
    Unknown,
}

impl std::fmt::Display for ImpactLocation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ImpactLocation::Front => "front",
            ImpactLocation::FrontSide => "front-side",
            ImpactLocation::Side => "side",
            ImpactLocation::BackSide => "back-side",
            ImpactLocation::Back => "back",
            ImpactLocation::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for ImpactLocation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "front" => ImpactLocation::Front,
            "front-side" => ImpactLocation::FrontSide,
            "side" => ImpactLocation::Side,
            "back-side" => ImpactLocation::BackSide,
            "back" => ImpactLocation::Back,
            "unknown" => ImpactLocation::Unknown,
            other => return Err(Error::invalid_input(format!("unknown impact location '{other}'"))),
        })
    }
}

/// Placement of one sensor on the headband.
///
/// `rotation` maps sensor-frame vectors into the head frame;
/// `position_angle_deg` is the angular position of the sensor around the
/// head, used by the synthetic generator's noise-decay model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorMount {
    pub sensor_id: String,
    pub rotation: [[f64; 3]; 3],
    pub position_angle_deg: f64,
}

impl SensorMount {
    pub fn new(sensor_id: impl Into<String>, rotation: [[f64; 3]; 3], position_angle_deg: f64) -> Result<Self> {
        let mount = Self {
            sensor_id: sensor_id.into(),
            rotation,
            position_angle_deg,
        };
        mount.validate()?;
        Ok(mount)
    }

    /// Check RᵀR = I and det(R) = +1 within 1e-9.
    pub fn validate(&self) -> Result<()> {
        let r = &self.rotation;
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| r[k][i] * r[k][j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                if (dot - expect).abs() > ROTATION_TOL {
                    return Err(Error::InvalidMount {
                        sensor_id: self.sensor_id.clone(),
                        reason: format!("R^T R deviates from identity at ({i},{j})"),
                    });
                }
            }
        }
        let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        if (det - 1.0).abs() > ROTATION_TOL {
            return Err(Error::InvalidMount {
                sensor_id: self.sensor_id.clone(),
                reason: format!("det(R) = {det}, expected +1"),
            });
        }
        Ok(())
    }

    pub fn apply(&self, v: &[f64; 3]) -> [f64; 3] {
        let r = &self.rotation;
        [
            r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2],
            r[1][0] * v[0] + r[1][1] * v[1] + r[1][2] * v[2],
            r[2][0] * v[0] + r[2][1] * v[1] + r[2][2] * v[2],
        ]
    }

    /// Rotation about the vertical (z) axis by `angle_deg`, the usual mount
    /// orientation for sensors distributed around the head circumference.
    pub fn about_z(sensor_id: impl Into<String>, angle_deg: f64) -> Self {
        let a = angle_deg.to_radians();
        let (s, c) = a.sin_cos();
        Self {
            sensor_id: sensor_id.into(),
            rotation: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
            position_angle_deg: angle_deg,
        }
    }
}

/// One sensor's raw streams (all in the sensor frame).
#[derive(Debug, Clone)]
pub struct SensorRecord {
    pub mount: SensorMount,
    pub gyro: Vec3Series,
    pub accel_low: Option<Vec3Series>,
    pub accel_high: Option<Vec3Series>,
}

/// Aligned multi-sensor capture around one impact.
#[derive(Debug, Clone)]
pub struct ImpactRecord {
    pub sensors: Vec<SensorRecord>,
    pub trigger_time: f64,
    pub location: ImpactLocation,
}

impl ImpactRecord {
    pub fn validate(&self) -> Result<()> {
        if self.sensors.is_empty() {
            return Err(Error::invalid_input("impact record has no sensors"));
        }
        for s in &self.sensors {
            s.mount.validate()?;
            if s.gyro.is_empty() {
                return Err(Error::invalid_input(format!(
                    "sensor '{}' has an empty gyro stream",
                    s.mount.sensor_id
                )));
            }
        }
        Ok(())
    }
}

/// Rotate a sensor-frame angular velocity stream into the head frame.
pub fn to_head_frame(gyro: &Vec3Series, mount: &SensorMount) -> Result<Vec3Series> {
    mount.validate()?;
    Ok(gyro.map_samples(|v| mount.apply(v)))
}

/// Combine low-g and high-g accelerometer streams on a shared grid.
///
/// The low-g channel is used while its resultant stays below `saturation`;
/// beyond that the high-g channel takes over.
pub fn merge_accel(low_g: &Vec3Series, high_g: &Vec3Series, saturation: f64) -> Result<Vec3Series> {
    if !low_g.same_grid(high_g) {
        return Err(Error::invalid_input(
            "low-g and high-g accelerometer grids do not match",
        ));
    }
    let samples = low_g
        .samples()
        .iter()
        .zip(high_g.samples())
        .map(|(lo, hi)| {
            let mag = (lo[0] * lo[0] + lo[1] * lo[1] + lo[2] * lo[2]).sqrt();
            if mag < saturation {
                *lo
            } else {
                *hi
            }
        })
        .collect();
    Vec3Series::new(low_g.start_time(), low_g.dt(), samples)
}

/// Time of the first sample whose resultant acceleration reaches `threshold`.
pub fn detect_impact_start(accel: &Vec3Series, threshold: f64) -> Result<f64> {
    if !(threshold > 0.0) {
        return Err(Error::invalid_input("trigger threshold must be positive"));
    }
    let resultant = accel.resultant()?;
    for (i, &v) in resultant.samples().iter().enumerate() {
        if v >= threshold {
            return Ok(resultant.time_at(i));
        }
    }
    Err(Error::NoImpactFound { threshold })
}

/// Component-wise mean of head-frame angular velocity streams.
pub fn average_angular_velocity(head_frame_gyros: &[Vec3Series]) -> Result<Vec3Series> {
    let first = head_frame_gyros
        .first()
        .ok_or_else(|| Error::invalid_input("no gyro streams to average"))?;
    for g in &head_frame_gyros[1..] {
        if !first.same_grid(g) {
            return Err(Error::invalid_input("gyro streams are not on a common grid"));
        }
    }
    let n = head_frame_gyros.len() as f64;
    let mut acc = vec![[0.0_f64; 3]; first.len()];
    for g in head_frame_gyros {
        for (a, v) in acc.iter_mut().zip(g.samples()) {
            a[0] += v[0];
            a[1] += v[1];
            a[2] += v[2];
        }
    }
    for a in &mut acc {
        a[0] /= n;
        a[1] /= n;
        a[2] /= n;
    }
    Vec3Series::new(first.start_time(), first.dt(), acc)
}
