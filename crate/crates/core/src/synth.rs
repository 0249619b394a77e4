//! Seeded synthetic impact generator and physical sanity models.
//!
//! Ground truth is a haversine angular-velocity pulse
//! `ω(t) = A·sin²(πt/T)` about a fixed axis, which is smooth, effectively
//! band-limited and has closed-form peaks (PRV = A, PRA = A·π/T). Each
//! simulated sensor observes the rigid motion in its own frame plus a
//! transient deformation burst (three damped sinusoids drawn from the noise
//! band, active only during the contact window) and white gyro noise. The
//! burst amplitude decays linearly with the angular distance between the
//! sensor and the impact site, from 1 at 0° to 0.2 at 180°.
//!
//! The contact window duration can be sanity-checked against the
//! Hertz-Mindlin elastic contact estimate implemented here.

use crate::error::{Error, Result};
use crate::fusion::{ImpactLocation, ImpactRecord, SensorMount, SensorRecord, GRAVITY};
use crate::series::Vec3Series;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Contact duration of an elastic sphere impact (Hertz-Mindlin):
/// `t_c = 2.94 · (5m / (4·E*·√R))^(2/5) · v^(−1/5)`.
pub fn hertz_contact_duration(
    mass_kg: f64,
    effective_modulus_pa: f64,
    radius_m: f64,
    speed_mps: f64,
) -> Result<f64> {
    for (name, v) in [
        ("mass", mass_kg),
        ("effective modulus", effective_modulus_pa),
        ("radius", radius_m),
        ("speed", speed_mps),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid_input(format!("{name} must be positive, got {v}")));
        }
    }
    let base = 5.0 * mass_kg / (4.0 * effective_modulus_pa * radius_m.sqrt());
    Ok(2.94 * base.powf(0.4) * speed_mps.powf(-0.2))
}

/// Parameters of one synthetic impact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticScenario {
    /// Peak rigid-body angular velocity, rad/s.
    pub pulse_amplitude: f64,
    /// Haversine pulse width, seconds.
    pub pulse_width: f64,
    /// Rotation axis (normalized internally).
    pub pulse_axis: [f64; 3],
    /// Transient-noise frequency band, Hz.
    pub noise_band: [f64; 2],
    /// Peak transient-noise angular velocity at the impact site, rad/s.
    pub noise_amplitude: f64,
    /// Contact window during which the transient noise is active, seconds.
    pub noise_duration: f64,
    /// Number of headband sensors.
    pub sensor_count: usize,
    /// Angular position of each sensor around the head, degrees.
    pub sensor_position_angles: Vec<f64>,
    /// Angular position of the impact site, degrees.
    pub impact_angle_deg: f64,
    /// White gyro measurement noise standard deviation, rad/s.
    pub gyro_noise_sd: f64,
    /// Gyro sample rate, Hz.
    pub sample_rate: f64,
    /// Accelerometer sample rate, Hz.
    pub accel_rate: f64,
    /// Peak linear acceleration of the embedded trigger pulse, m/s².
    pub lin_accel_peak: f64,
    /// Total recording duration, seconds.
    pub record_duration: f64,
    /// Impact (pulse start) time within the recording, seconds.
    pub impact_time: f64,
    /// Low-g accelerometer full scale, g (the low-g stream clips here).
    pub accel_low_full_scale_g: f64,
    /// Impact location label carried into the record.
    pub location: ImpactLocation,
}

impl Default for SyntheticScenario {
    fn default() -> Self {
        Self {
            pulse_amplitude: 10.0,
            pulse_width: 0.100,
            pulse_axis: [0.0, 1.0, 0.0],
            noise_band: [100.0, 250.0],
            noise_amplitude: 2.0,
            noise_duration: 0.025,
            sensor_count: 5,
            sensor_position_angles: vec![120.0, 150.0, 180.0, 210.0, 240.0],
            impact_angle_deg: 0.0,
            gyro_noise_sd: 0.05,
            sample_rate: 1125.0,
            accel_rate: 1600.0,
            lin_accel_peak: 200.0,
            record_duration: 0.6,
            impact_time: 0.3,
            accel_low_full_scale_g: 16.0,
            location: ImpactLocation::Front,
        }
    }
}

impl SyntheticScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.pulse_width > 0.0) {
            return Err(Error::invalid_input("pulse_width must be positive"));
        }
        let nyquist = self.sample_rate / 2.0;
        if !(self.noise_band[0] > 0.0 && self.noise_band[0] < self.noise_band[1] && self.noise_band[1] < nyquist) {
            return Err(Error::invalid_input(format!(
                "noise_band must lie within (0, {nyquist}) Hz"
            )));
        }
        if self.sensor_count == 0 {
            return Err(Error::invalid_input("sensor_count must be at least 1"));
        }
        if self.sensor_position_angles.len() != self.sensor_count {
            return Err(Error::invalid_input(
                "sensor_position_angles length must equal sensor_count",
            ));
        }
        if !(self.noise_duration > 0.0) {
            return Err(Error::invalid_input("noise_duration must be positive"));
        }
        if !(self.impact_time > 0.0 && self.impact_time < self.record_duration) {
            return Err(Error::invalid_input("impact_time must fall inside the recording"));
        }
        let axis_norm = self.pulse_axis.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(axis_norm > 0.0) {
            return Err(Error::invalid_input("pulse_axis must be nonzero"));
        }
        Ok(())
    }

    fn unit_axis(&self) -> [f64; 3] {
        let n = self.pulse_axis.iter().map(|v| v * v).sum::<f64>().sqrt();
        [
            self.pulse_axis[0] / n,
            self.pulse_axis[1] / n,
            self.pulse_axis[2] / n,
        ]
    }

    /// Linear amplitude falloff from 1 at 0° angular distance to 0.2 at 180°.
    pub fn noise_decay(&self, sensor_angle_deg: f64) -> f64 {
        let mut d = (sensor_angle_deg - self.impact_angle_deg).rem_euclid(360.0);
        if d > 180.0 {
            d = 360.0 - d;
        }
        1.0 - 0.8 * d / 180.0
    }
}

/// Noise-free rigid-body motion with closed-form peaks.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub angular_velocity: Vec3Series,
    pub prv: f64,
    pub pra: f64,
}

/// Haversine angular-velocity pulse about the scenario axis.
pub fn generate_ground_truth(scenario: &SyntheticScenario) -> Result<GroundTruth> {
    scenario.validate()?;
    let dt = 1.0 / scenario.sample_rate;
    let n = (scenario.record_duration / dt).floor() as usize + 1;
    let axis = scenario.unit_axis();
    let a = scenario.pulse_amplitude;
    let t0 = scenario.impact_time;
    let width = scenario.pulse_width;
    let samples = (0..n)
        .map(|i| {
            let u = i as f64 * dt - t0;
            let mag = if (0.0..=width).contains(&u) {
                a * (PI * u / width).sin().powi(2)
            } else {
                0.0
            };
            [axis[0] * mag, axis[1] * mag, axis[2] * mag]
        })
        .collect();
    Ok(GroundTruth {
        angular_velocity: Vec3Series::new(0.0, dt, samples)?,
        prv: a,
        pra: a * PI / width,
    })
}

/// Three damped sinusoids confined to the contact window.
struct TransientBurst {
    freqs: [f64; 3],
    phases: [f64; 3],
    amplitude: f64,
    damping: f64,
}

impl TransientBurst {
    fn draw(rng: &mut ChaCha8Rng, scenario: &SyntheticScenario, decay: f64) -> Self {
        let mut freqs = [0.0; 3];
        let mut phases = [0.0; 3];
        for j in 0..3 {
            freqs[j] = rng.gen_range(scenario.noise_band[0]..scenario.noise_band[1]);
            phases[j] = rng.gen_range(0.0..2.0 * PI);
        }
        TransientBurst {
            freqs,
            phases,
            amplitude: scenario.noise_amplitude * decay / 3.0,
            // envelope falls to 5% by the end of the contact window
            damping: 20.0_f64.ln() / scenario.noise_duration,
        }
    }

    fn value(&self, u: f64, duration: f64) -> f64 {
        if !(0.0..=duration).contains(&u) {
            return 0.0;
        }
        let envelope = (-self.damping * u).exp();
        self.freqs
            .iter()
            .zip(&self.phases)
            .map(|(&f, &p)| self.amplitude * envelope * (2.0 * PI * f * u + p).sin())
            .sum()
    }
}

/// Generate the full per-sensor record plus its ground truth.
///
/// Deterministic for a fixed (scenario, seed) pair.
pub fn synthesize_impact(
    scenario: &SyntheticScenario,
    seed: u64,
) -> Result<(ImpactRecord, GroundTruth)> {
    scenario.validate()?;
    let truth = generate_ground_truth(scenario)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dt = 1.0 / scenario.sample_rate;
    let n = truth.angular_velocity.len();
    let t0 = scenario.impact_time;

    // linear-acceleration pulse direction in the head frame (from the
    // impact site, horizontal)
    let impact_rad = scenario.impact_angle_deg.to_radians();
    let accel_dir = [impact_rad.cos(), impact_rad.sin(), 0.0];
    let accel_dt = 1.0 / scenario.accel_rate;
    let n_accel = (scenario.record_duration / accel_dt).floor() as usize + 1;
    let low_clip = scenario.accel_low_full_scale_g * GRAVITY;

    let mut sensors = Vec::with_capacity(scenario.sensor_count);
    for (i, &angle) in scenario.sensor_position_angles.iter().enumerate() {
        let mount = SensorMount::about_z(format!("bt{}", i + 1), angle);
        let decay = scenario.noise_decay(angle);
        let bursts: [TransientBurst; 3] = [
            TransientBurst::draw(&mut rng, scenario, decay),
            TransientBurst::draw(&mut rng, scenario, decay),
            TransientBurst::draw(&mut rng, scenario, decay),
        ];

        let r = &mount.rotation;
        let gyro_samples: Vec<[f64; 3]> = (0..n)
            .map(|k| {
                let t = k as f64 * dt;
                let w = truth.angular_velocity.samples()[k];
                // sensor frame = R^T * head frame
                let mut v = [
                    r[0][0] * w[0] + r[1][0] * w[1] + r[2][0] * w[2],
                    r[0][1] * w[0] + r[1][1] * w[1] + r[2][1] * w[2],
                    r[0][2] * w[0] + r[1][2] * w[1] + r[2][2] * w[2],
                ];
                for (axis, burst) in v.iter_mut().zip(&bursts) {
                    *axis += burst.value(t - t0, scenario.noise_duration);
                    if scenario.gyro_noise_sd > 0.0 {
                        // Box-Muller white noise
                        let u1: f64 = rng.gen_range(1e-12..1.0);
                        let u2: f64 = rng.gen_range(0.0..1.0);
                        *axis += scenario.gyro_noise_sd
                            * (-2.0 * u1.ln()).sqrt()
                            * (2.0 * PI * u2).cos();
                    }
                }
                v
            })
            .collect();

        let mut low = Vec::with_capacity(n_accel);
        let mut high = Vec::with_capacity(n_accel);
        for k in 0..n_accel {
            let u = k as f64 * accel_dt - t0;
            let mag = if (0.0..=scenario.noise_duration).contains(&u) {
                scenario.lin_accel_peak * (PI * u / scenario.noise_duration).sin().powi(2)
            } else {
                0.0
            };
            let head = [accel_dir[0] * mag, accel_dir[1] * mag, accel_dir[2] * mag];
            let sensor = [
                r[0][0] * head[0] + r[1][0] * head[1] + r[2][0] * head[2],
                r[0][1] * head[0] + r[1][1] * head[1] + r[2][1] * head[2],
                r[0][2] * head[0] + r[1][2] * head[1] + r[2][2] * head[2],
            ];
            low.push(sensor.map(|v| v.clamp(-low_clip, low_clip)));
            high.push(sensor);
        }

        sensors.push(SensorRecord {
            mount,
            gyro: Vec3Series::new(0.0, dt, gyro_samples)?,
            accel_low: Some(Vec3Series::new(0.0, accel_dt, low)?),
            accel_high: Some(Vec3Series::new(0.0, accel_dt, high)?),
        });
    }

    Ok((
        ImpactRecord {
            sensors,
            trigger_time: t0,
            location: scenario.location,
        },
        truth,
    ))
}
