//! Pipeline configuration with the documented defaults.

use crate::error::{Error, Result};
use crate::fusion::GRAVITY;
use crate::series::ImpactWindow;
use serde::{Deserialize, Serialize};

/// Butterworth application mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterMode {
    /// Single-pass order-n filter (SAE-style processing, phase lag present).
    Causal,
    /// Forward-backward pass of order-n/2 sections: effective order n with
    /// zero phase lag, allowing time-aligned comparison against reference
    /// channels.
    ZeroPhase,
}

/// Which channel defines the 3 g impact trigger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TriggerSource {
    /// Detect the crossing on the array-averaged merged acceleration.
    Detect,
    /// Trust the trigger time stored in the recording.
    Recorded,
}

/// Parameters of the simplified corridor/correlation curve rating.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoraConfig {
    /// Inner corridor half-width as a fraction of the peak reference value.
    pub inner_frac: f64,
    /// Outer corridor half-width as a fraction of the peak reference value.
    pub outer_frac: f64,
    /// Weight of the corridor group (the correlation group gets 1 - this).
    pub corridor_weight: f64,
    /// Maximum phase shift (seconds) mapping to a phase sub-score of zero.
    pub max_phase_shift: f64,
    /// Fraction of the peak reference value defining the evaluation
    /// interval (first/last sample exceeding it).
    pub eval_threshold_frac: f64,
}

impl Default for CoraConfig {
    fn default() -> Self {
        Self {
            inner_frac: 0.05,
            outer_frac: 0.5,
            corridor_weight: 0.5,
            max_phase_shift: 0.05,
            eval_threshold_frac: 0.05,
        }
    }
}

impl CoraConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.inner_frac > 0.0 && self.outer_frac > self.inner_frac) {
            return Err(Error::Config("corridor widths need 0 < inner < outer".into()));
        }
        if !(0.0..=1.0).contains(&self.corridor_weight) {
            return Err(Error::Config("corridor_weight must lie in [0, 1]".into()));
        }
        if !(self.max_phase_shift > 0.0) {
            return Err(Error::Config("max_phase_shift must be positive".into()));
        }
        if !(self.eval_threshold_frac > 0.0 && self.eval_threshold_frac < 1.0) {
            return Err(Error::Config("eval_threshold_frac must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// All tunables of the reconstruction pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Scale-grid prefactor.
    pub alpha: f64,
    /// Number of octaves on the scale grid.
    pub octaves: usize,
    /// Voices per octave.
    pub voices: usize,
    /// Normalized-coefficient threshold for f_ss / f_n selection.
    pub threshold: f64,
    /// Hard cutoff cap in Hz.
    pub cap_hz: f64,
    /// Impact trigger threshold in g.
    pub trigger_g: f64,
    /// Analysis window before the trigger, milliseconds.
    pub window_pre_ms: f64,
    /// Analysis window after the trigger, milliseconds.
    pub window_post_ms: f64,
    /// End-of-head-motion mark, milliseconds after the trigger.
    pub beta_end_ms: f64,
    /// Butterworth order (2 or 4).
    pub filter_order: usize,
    /// Causal or zero-phase filtering.
    pub filter_mode: FilterMode,
    /// Low-g/high-g handoff point as a fraction of the low-g full scale.
    pub saturation_factor: f64,
    /// Common analysis sample rate, Hz (the gyro rate).
    pub sample_rate: f64,
    /// Low-g accelerometer full scale, g.
    pub accel_low_full_scale_g: f64,
    /// Channel defining the trigger.
    pub trigger_source: TriggerSource,
    /// Axes whose β = 0 wavelet peak falls below this fraction of the
    /// strongest axis are skipped when selecting the cutoff.
    pub axis_floor: f64,
    /// Curve-rating parameters.
    pub cora: CoraConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            alpha: 1.92,
            octaves: 10,
            voices: 40,
            threshold: 0.1,
            cap_hz: 180.0,
            trigger_g: 3.0,
            window_pre_ms: 50.0,
            window_post_ms: 150.0,
            beta_end_ms: 100.0,
            filter_order: 4,
            filter_mode: FilterMode::ZeroPhase,
            saturation_factor: 0.9,
            sample_rate: 1125.0,
            accel_low_full_scale_g: 16.0,
            trigger_source: TriggerSource::Detect,
            axis_floor: 0.05,
            cora: CoraConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || self.octaves == 0 || self.voices == 0 {
            return Err(Error::Config("scale grid parameters must be positive".into()));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::Config("threshold must lie in (0, 1)".into()));
        }
        if !(self.cap_hz > 0.0) {
            return Err(Error::Config("cap_hz must be positive".into()));
        }
        if !(self.trigger_g > 0.0) {
            return Err(Error::Config("trigger_g must be positive".into()));
        }
        if !matches!(self.filter_order, 2 | 4) {
            return Err(Error::Config(format!(
                "filter_order must be 2 or 4, got {}",
                self.filter_order
            )));
        }
        if !(self.saturation_factor > 0.0 && self.saturation_factor <= 1.0) {
            return Err(Error::Config("saturation_factor must lie in (0, 1]".into()));
        }
        if !(self.sample_rate > 0.0) {
            return Err(Error::Config("sample_rate must be positive".into()));
        }
        if !(self.axis_floor >= 0.0 && self.axis_floor < 1.0) {
            return Err(Error::Config("axis_floor must lie in [0, 1)".into()));
        }
        // the 200 ms minimum keeps wavelet edge effects away from the slices
        if self.window_pre_ms + self.window_post_ms < 200.0 - 1e-9 {
            return Err(Error::Config(
                "analysis window must cover at least 200 ms".into(),
            ));
        }
        self.window()?;
        self.cora.validate()?;
        Ok(())
    }

    /// Analysis window in seconds.
    pub fn window(&self) -> Result<ImpactWindow> {
        ImpactWindow::new(
            self.window_pre_ms / 1000.0,
            self.window_post_ms / 1000.0,
            self.beta_end_ms / 1000.0,
        )
    }

    /// Trigger threshold in m/s².
    pub fn trigger_threshold(&self) -> f64 {
        self.trigger_g * GRAVITY
    }

    /// Low-g/high-g handoff acceleration in m/s².
    pub fn saturation_threshold(&self) -> f64 {
        self.saturation_factor * self.accel_low_full_scale_g * GRAVITY
    }

    /// Common analysis sample interval.
    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate
    }
}
