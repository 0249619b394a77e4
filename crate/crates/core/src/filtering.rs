//! Adaptive cutoff selection and the end-to-end reconstruction pipeline.
//!
//! The cutoff rule works on two normalized scalogram slices: the coefficient
//! magnitudes at the impact trigger (β = 0) and at the end of head motion
//! (β = 100 ms), both normalized by the β = 0 maximum. The highest frequency
//! still present at the end of motion is `f_ss`; the lowest frequency where
//! the slice difference exceeds the threshold marks the onset of transient
//! noise, `f_n`. The cutoff is
//!
//! ```text
//! f_0 = max(f_ss, f_n)   if that maximum is below 180 Hz,
//! f_0 = 180 Hz           otherwise (SAE J211 cap; also when f_n is absent).
//! ```
//!
//! The angular velocity is low-passed at `f_0` with a 4th-order Butterworth
//! filter and differentiated with a five-point stencil.

use crate::config::{FilterMode, PipelineConfig, TriggerSource};
use crate::error::{Error, Result};
use crate::fusion::{
    average_angular_velocity, detect_impact_start, merge_accel, to_head_frame, ImpactRecord,
};
use crate::series::{ScalarSeries, Vec3Series};
use crate::wavelet::{cwt, ScaleGrid, WaveletSpectrum};
use serde::{Deserialize, Serialize};

/// Which arm of the cutoff rule produced `f_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffBranch {
    /// `f_n > f_ss`: noise band sits above the signal band.
    NoiseSeparated,
    /// `f_n < f_ss`: noise overlaps the signal band.
    Overlapping,
    /// `max(f_ss, f_n)` exceeded the cap, or no noise onset was found.
    Capped,
}

impl std::fmt::Display for CutoffBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CutoffBranch::NoiseSeparated => "noise-separated",
            CutoffBranch::Overlapping => "overlapping",
            CutoffBranch::Capped => "capped",
        })
    }
}

/// Outcome of the cutoff selection for one impact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterDecision {
    pub f_ss: f64,
    pub f_n: Option<f64>,
    pub f_0: f64,
    pub branch: CutoffBranch,
    pub threshold: f64,
}

/// One normalized scalogram column, restricted to sub-Nyquist bins.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSlice {
    /// Descending, following the η grid order.
    pub frequencies: Vec<f64>,
    pub values: Vec<f64>,
    pub beta: f64,
}

/// Per-frequency slice difference Δw̄ = w̄(0,η) − w̄(100,η).
#[derive(Debug, Clone, PartialEq)]
pub struct TransientDifference {
    pub frequencies: Vec<f64>,
    pub values: Vec<f64>,
}

/// Reconstructed head kinematics for one impact, in trigger-relative time.
#[derive(Debug, Clone)]
pub struct HeadKinematics {
    pub angular_velocity: Vec3Series,
    pub angular_acceleration: Vec3Series,
    pub prv: f64,
    pub pra: f64,
    pub pla: Option<f64>,
    pub decision: FilterDecision,
}

/// Slice at `beta`, normalized by the β = 0 maximum over sub-Nyquist bins.
pub fn normalized_slice(spectrum: &WaveletSpectrum, beta: f64) -> Result<CoefficientSlice> {
    let base_index = spectrum.beta_index(0.0).map_err(|_| {
        Error::invalid_input("spectrum does not contain the β = 0 column needed for normalization")
    })?;
    let index = spectrum.beta_index(beta)?;
    let keep: Vec<usize> = (0..spectrum.grid().len())
        .filter(|&i| !spectrum.is_above_nyquist(i))
        .collect();
    let denom = keep
        .iter()
        .map(|&i| spectrum.coefficient(base_index, i).norm())
        .fold(0.0_f64, f64::max);
    if denom == 0.0 {
        return Err(Error::DegenerateSignal(
            "β = 0 wavelet slice is identically zero".into(),
        ));
    }
    let frequencies = keep.iter().map(|&i| spectrum.frequency(i)).collect();
    let values = keep
        .iter()
        .map(|&i| spectrum.coefficient(index, i).norm() / denom)
        .collect();
    Ok(CoefficientSlice {
        frequencies,
        values,
        beta: spectrum.betas()[index],
    })
}

/// Δw̄ between the β = 0 and β = 100 ms slices.
pub fn transient_difference(
    w0: &CoefficientSlice,
    w_end: &CoefficientSlice,
) -> Result<TransientDifference> {
    if w0.frequencies.len() != w_end.frequencies.len()
        || w0
            .frequencies
            .iter()
            .zip(&w_end.frequencies)
            .any(|(a, b)| (a - b).abs() > 1e-9 * a.abs())
    {
        return Err(Error::invalid_input("slice frequency axes do not match"));
    }
    let values = w0
        .values
        .iter()
        .zip(&w_end.values)
        .map(|(a, b)| a - b)
        .collect();
    Ok(TransientDifference {
        frequencies: w0.frequencies.clone(),
        values,
    })
}

/// Highest frequency still above `threshold` at the end of head motion
/// (`f_ss`). Falls back to the lowest grid frequency when nothing crosses.
pub fn signal_end_frequency(w_end: &CoefficientSlice, threshold: f64) -> f64 {
    // frequencies are descending: the first crossing is the highest
    for (f, v) in w_end.frequencies.iter().zip(&w_end.values) {
        if *v > threshold {
            return *f;
        }
    }
    *w_end.frequencies.last().expect("slice is non-empty")
}

/// Lowest frequency where Δw̄ exceeds `threshold` (`f_n`); `None` when the
/// transient noise is not prominent at any measured frequency.
pub fn noise_onset_frequency(delta: &TransientDifference, threshold: f64) -> Option<f64> {
    // iterate from the low-frequency end of the descending axis
    for (f, v) in delta.frequencies.iter().zip(&delta.values).rev() {
        if *v > threshold {
            return Some(*f);
        }
    }
    None
}

/// Apply the cutoff rule to one (f_ss, f_n) pair.
pub fn cutoff_frequency(
    f_ss: f64,
    f_n: Option<f64>,
    threshold: f64,
    cap_hz: f64,
) -> FilterDecision {
    match f_n {
        None => FilterDecision {
            f_ss,
            f_n: None,
            f_0: cap_hz,
            branch: CutoffBranch::Capped,
            threshold,
        },
        Some(fn_hz) => {
            let m = f_ss.max(fn_hz);
            if m > cap_hz {
                FilterDecision {
                    f_ss,
                    f_n: Some(fn_hz),
                    f_0: cap_hz,
                    branch: CutoffBranch::Capped,
                    threshold,
                }
            } else {
                let branch = if fn_hz > f_ss {
                    CutoffBranch::NoiseSeparated
                } else {
                    CutoffBranch::Overlapping
                };
                FilterDecision {
                    f_ss,
                    f_n: Some(fn_hz),
                    f_0: m,
                    branch,
                    threshold,
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Butterworth low-pass
// ---------------------------------------------------------------------------

/// One second-order section (transposed direct form II).
#[derive(Debug, Clone, Copy)]
struct Section {
    b0: f64,
    b1: f64,
    b2: f64,
    a1: f64,
    a2: f64,
}

impl Section {
    /// Steady-state filter state for a unit-step input, so constant inputs
    /// pass through without a start-up transient.
    fn step_state(&self) -> [f64; 2] {
        let k = (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2);
        [k - self.b0, self.b2 - self.a2 * k]
    }

    fn run(&self, x: &[f64], scale_state: f64) -> Vec<f64> {
        let zi = self.step_state();
        let mut z1 = zi[0] * scale_state;
        let mut z2 = zi[1] * scale_state;
        x.iter()
            .map(|&v| {
                let y = self.b0 * v + z1;
                z1 = self.b1 * v - self.a1 * y + z2;
                z2 = self.b2 * v - self.a2 * y;
                y
            })
            .collect()
    }
}

/// Butterworth low-pass as a cascade of second-order (and possibly one
/// first-order) sections, via the bilinear transform with prewarping.
fn design_lowpass(order: usize, cutoff_hz: f64, sample_rate: f64) -> Result<Vec<Section>> {
    if !(cutoff_hz > 0.0 && cutoff_hz < sample_rate / 2.0) {
        return Err(Error::InvalidCutoff {
            cutoff_hz,
            sample_rate_hz: sample_rate,
        });
    }
    let k = 2.0 * sample_rate;
    let wc = k * (std::f64::consts::PI * cutoff_hz / sample_rate).tan();
    let mut sections = Vec::new();
    let pairs = order / 2;
    for i in 1..=pairs {
        let theta = std::f64::consts::PI * (2 * i + order - 1) as f64 / (2 * order) as f64;
        let two_zeta_wc = -2.0 * theta.cos() * wc;
        let d = k * k + two_zeta_wc * k + wc * wc;
        sections.push(Section {
            b0: wc * wc / d,
            b1: 2.0 * wc * wc / d,
            b2: wc * wc / d,
            a1: (2.0 * wc * wc - 2.0 * k * k) / d,
            a2: (k * k - two_zeta_wc * k + wc * wc) / d,
        });
    }
    if order % 2 == 1 {
        let d = k + wc;
        sections.push(Section {
            b0: wc / d,
            b1: wc / d,
            b2: 0.0,
            a1: (wc - k) / d,
            a2: 0.0,
        });
    }
    Ok(sections)
}

fn run_cascade(sections: &[Section], x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    for s in sections {
        let first = y.first().copied().unwrap_or(0.0);
        y = s.run(&y, first);
    }
    y
}

/// Forward-backward filtering with odd-symmetric edge extension.
fn filtfilt(sections: &[Section], x: &[f64], padlen: usize) -> Vec<f64> {
    let n = x.len();
    let pad = padlen.min(n.saturating_sub(1));
    let mut ext = Vec::with_capacity(n + 2 * pad);
    for i in 0..pad {
        ext.push(2.0 * x[0] - x[pad - i]);
    }
    ext.extend_from_slice(x);
    for i in 0..pad {
        ext.push(2.0 * x[n - 1] - x[n - 2 - i]);
    }
    let mut y = run_cascade(sections, &ext);
    y.reverse();
    let mut y = run_cascade(sections, &y);
    y.reverse();
    y[pad..pad + n].to_vec()
}

fn lowpass_channel(
    x: &[f64],
    cutoff_hz: f64,
    order: usize,
    mode: FilterMode,
    sample_rate: f64,
) -> Result<Vec<f64>> {
    if !matches!(order, 2 | 4) {
        return Err(Error::invalid_input(format!(
            "filter order must be 2 or 4, got {order}"
        )));
    }
    match mode {
        FilterMode::Causal => {
            let sections = design_lowpass(order, cutoff_hz, sample_rate)?;
            Ok(run_cascade(&sections, x))
        }
        FilterMode::ZeroPhase => {
            // two passes of order/2 sections give effective order `order`
            let sections = design_lowpass(order / 2, cutoff_hz, sample_rate)?;
            let padlen = ((3.0 * sample_rate / cutoff_hz).ceil() as usize).max(24);
            Ok(filtfilt(&sections, x, padlen))
        }
    }
}

/// Butterworth low-pass of a scalar series.
pub fn butterworth_lowpass_scalar(
    series: &ScalarSeries,
    cutoff_hz: f64,
    order: usize,
    mode: FilterMode,
) -> Result<ScalarSeries> {
    let y = lowpass_channel(series.samples(), cutoff_hz, order, mode, 1.0 / series.dt())?;
    ScalarSeries::new(series.start_time(), series.dt(), y)
}

/// Butterworth low-pass applied per component of a 3-vector series.
pub fn butterworth_lowpass(
    series: &Vec3Series,
    cutoff_hz: f64,
    order: usize,
    mode: FilterMode,
) -> Result<Vec3Series> {
    let rate = 1.0 / series.dt();
    let mut channels = Vec::with_capacity(3);
    for axis in 0..3 {
        let x: Vec<f64> = series.samples().iter().map(|v| v[axis]).collect();
        channels.push(lowpass_channel(&x, cutoff_hz, order, mode, rate)?);
    }
    Vec3Series::from_axes(
        series.start_time(),
        series.dt(),
        &channels[0],
        &channels[1],
        &channels[2],
    )
}

// ---------------------------------------------------------------------------
// Five-point stencil
// ---------------------------------------------------------------------------

/// Central five-point-stencil derivative, exact through degree-4 polynomials.
///
/// The output is truncated by two samples on each side; `start_time` moves
/// forward accordingly.
pub fn five_point_derivative(series: &Vec3Series) -> Result<Vec3Series> {
    let n = series.len();
    if n < 5 {
        return Err(Error::invalid_input(format!(
            "five-point stencil needs at least 5 samples, got {n}"
        )));
    }
    let h = series.dt();
    let x = series.samples();
    let samples = (2..n - 2)
        .map(|i| {
            let mut d = [0.0; 3];
            for c in 0..3 {
                d[c] = (-x[i + 2][c] + 8.0 * x[i + 1][c] - 8.0 * x[i - 1][c] + x[i - 2][c])
                    / (12.0 * h);
            }
            d
        })
        .collect();
    Vec3Series::new(series.time_at(2), h, samples)
}

// ---------------------------------------------------------------------------
// Reconstruction pipeline
// ---------------------------------------------------------------------------

/// Per-axis cutoff candidate computed from one windowed scalar signal.
fn axis_decision(
    signal: &ScalarSeries,
    grid: &ScaleGrid,
    beta_end: f64,
    threshold: f64,
    cap_hz: f64,
) -> Result<(f64, FilterDecision)> {
    let spectrum = cwt(signal, grid, &[0.0, beta_end])?;
    let w0 = normalized_slice(&spectrum, 0.0)?;
    let w_end = normalized_slice(&spectrum, beta_end)?;
    let delta = transient_difference(&w0, &w_end)?;
    let f_ss = signal_end_frequency(&w_end, threshold);
    let f_n = noise_onset_frequency(&delta, threshold);
    let decision = cutoff_frequency(f_ss, f_n, threshold, cap_hz);
    // the β = 0 peak magnitude, for the weak-axis floor
    let base_index = spectrum.beta_index(0.0)?;
    let peak = (0..grid.len())
        .filter(|&i| !spectrum.is_above_nyquist(i))
        .map(|i| spectrum.coefficient(base_index, i).norm())
        .fold(0.0_f64, f64::max);
    Ok((peak, decision))
}

/// Averaged head-frame angular velocity on the common analysis grid.
fn averaged_head_gyro(record: &ImpactRecord, config: &PipelineConfig) -> Result<Vec3Series> {
    let dt = config.dt();
    let resampled: Vec<Vec3Series> = record
        .sensors
        .iter()
        .map(|s| {
            let head = to_head_frame(&s.gyro, &s.mount)?;
            head.resample(dt)
        })
        .collect::<Result<_>>()?;
    let start = resampled
        .iter()
        .map(|s| s.start_time())
        .fold(f64::NEG_INFINITY, f64::max);
    let end = resampled
        .iter()
        .map(|s| s.end_time())
        .fold(f64::INFINITY, f64::min);
    if end <= start {
        return Err(Error::invalid_input("gyro streams do not overlap in time"));
    }
    let n = ((end - start) / dt + 1e-9).floor() as usize + 1;
    let aligned: Vec<Vec3Series> = resampled
        .iter()
        .map(|s| s.interp_onto(start, dt, n))
        .collect::<Result<_>>()?;
    average_angular_velocity(&aligned)
}

/// Averaged head-frame merged acceleration, if any sensor carries
/// accelerometer streams.
fn averaged_head_accel(record: &ImpactRecord, config: &PipelineConfig) -> Result<Option<Vec3Series>> {
    let dt = config.dt();
    let saturation = config.saturation_threshold();
    let mut streams = Vec::new();
    for s in &record.sensors {
        let merged = match (&s.accel_low, &s.accel_high) {
            (Some(lo), Some(hi)) => {
                let lo = lo.resample(dt)?;
                let start = lo.start_time().max(hi.start_time());
                let end = lo.end_time().min(hi.end_time());
                if end <= start {
                    return Err(Error::invalid_input(
                        "low-g and high-g accelerometer streams do not overlap",
                    ));
                }
                let n = ((end - start) / dt + 1e-9).floor() as usize + 1;
                let lo = lo.interp_onto(start, dt, n)?;
                let hi = hi.interp_onto(start, dt, n)?;
                merge_accel(&lo, &hi, saturation)?
            }
            (Some(one), None) | (None, Some(one)) => one.resample(dt)?,
            (None, None) => continue,
        };
        streams.push(to_head_frame(&merged, &s.mount)?);
    }
    if streams.is_empty() {
        return Ok(None);
    }
    let start = streams
        .iter()
        .map(|s| s.start_time())
        .fold(f64::NEG_INFINITY, f64::max);
    let end = streams
        .iter()
        .map(|s| s.end_time())
        .fold(f64::INFINITY, f64::min);
    let n = ((end - start) / dt + 1e-9).floor() as usize + 1;
    let aligned: Vec<Vec3Series> = streams
        .iter()
        .map(|s| s.interp_onto(start, dt, n))
        .collect::<Result<_>>()?;
    Ok(Some(average_angular_velocity(&aligned)?))
}

/// Full reconstruction for one impact: frame alignment, array averaging,
/// trigger detection, adaptive cutoff selection, Butterworth filtering and
/// five-point differentiation.
pub fn reconstruct(record: &ImpactRecord, config: &PipelineConfig) -> Result<HeadKinematics> {
    config.validate()?;
    record.validate()?;
    let avg_gyro = averaged_head_gyro(record, config)?;
    let avg_accel = averaged_head_accel(record, config)?;

    let trigger = match config.trigger_source {
        TriggerSource::Recorded => record.trigger_time,
        TriggerSource::Detect => {
            let accel = avg_accel.as_ref().ok_or_else(|| {
                Error::invalid_input(
                    "trigger detection requested but the record has no accelerometer streams",
                )
            })?;
            detect_impact_start(accel, config.trigger_threshold())?
        }
    };

    let window = config.window()?;
    let windowed = avg_gyro.extract_window(trigger, &window)?.rebased(trigger);
    let beta_end = window.beta_end;
    let grid = ScaleGrid::new(config.alpha, config.octaves, config.voices)?;

    // Per-axis cutoff candidates; axes with negligible wavelet energy are
    // skipped so noise-only axes cannot drive the decision.
    let mut candidates = Vec::new();
    for axis in 0..3 {
        let signal = windowed.component(axis);
        match axis_decision(&signal, &grid, beta_end, config.threshold, config.cap_hz) {
            Ok(pd) => candidates.push(pd),
            Err(Error::DegenerateSignal(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let strongest = candidates.iter().map(|(p, _)| *p).fold(0.0_f64, f64::max);
    if strongest == 0.0 {
        return Err(Error::DegenerateSignal(
            "no axis carries angular-velocity energy in the analysis window".into(),
        ));
    }
    let decision = candidates
        .iter()
        .filter(|(p, _)| *p >= config.axis_floor * strongest)
        .map(|(_, d)| *d)
        .max_by(|a, b| a.f_0.total_cmp(&b.f_0))
        .expect("at least the strongest axis survives the floor");

    let filtered = butterworth_lowpass(&windowed, decision.f_0, config.filter_order, config.filter_mode)?;
    let angular_acceleration = five_point_derivative(&filtered)?;
    let prv = filtered.resultant()?.max_from(0.0);
    let pra = angular_acceleration.resultant()?.max_from(0.0);
    let pla = match &avg_accel {
        Some(a) => {
            let w = a.extract_window(trigger, &window)?.rebased(trigger);
            Some(w.resultant()?.max_from(0.0))
        }
        None => None,
    };

    Ok(HeadKinematics {
        angular_velocity: filtered,
        angular_acceleration,
        prv,
        pra,
        pla,
        decision,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{ScalarSeries, Vec3Series};
    use crate::wavelet::{cwt, ScaleGrid};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn slice(freqs: Vec<f64>, values: Vec<f64>) -> CoefficientSlice {
        CoefficientSlice {
            frequencies: freqs,
            values,
            beta: 0.0,
        }
    }

    fn windowed_pulse(width: f64) -> ScalarSeries {
        // haversine pulse starting at beta = 0, on the default 200 ms window
        let dt = 1.0 / 1125.0;
        let n = 226;
        let samples = (0..n)
            .map(|i| {
                let t = -0.050 + i as f64 * dt;
                if (0.0..=width).contains(&t) {
                    10.0 * (PI * t / width).sin().powi(2)
                } else {
                    0.0
                }
            })
            .collect();
        ScalarSeries::new(-0.050, dt, samples).unwrap()
    }

    #[test]
    fn zero_slice_is_normalized_to_one() {
        let s = windowed_pulse(0.080);
        let spec = cwt(&s, &ScaleGrid::default(), &[0.0, 0.1]).unwrap();
        let w0 = normalized_slice(&spec, 0.0).unwrap();
        let max = w0.values.iter().cloned().fold(0.0_f64, f64::max);
        assert_eq!(max, 1.0);
        assert!(w0.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn short_pulse_decays_by_end_of_motion() {
        // A 25 ms pulse has faded well before beta = 100 ms, so everything
        // above the lowest octaves drops under threshold there (the widest
        // low-frequency wavelets still reach back into the pulse, which is
        // exactly why f_ss comes out low rather than zero).
        let s = windowed_pulse(0.025);
        let spec = cwt(&s, &ScaleGrid::default(), &[0.0, 0.1]).unwrap();
        let w100 = normalized_slice(&spec, 0.1).unwrap();
        let above_60 = w100
            .frequencies
            .iter()
            .zip(&w100.values)
            .filter(|(&f, _)| f >= 60.0)
            .map(|(_, &v)| v)
            .fold(0.0_f64, f64::max);
        assert!(above_60 < 0.1, "β = 100 ms slice peak above 60 Hz: {above_60}");
        let f_ss = signal_end_frequency(&w100, 0.1);
        assert!(f_ss < 60.0, "f_ss = {f_ss} Hz");
        // at beta = 0 the pulse itself still carries content above threshold
        let w0 = normalized_slice(&spec, 0.0).unwrap();
        let f_ss0 = signal_end_frequency(&w0, 0.1);
        assert!(f_ss0 > f_ss, "f_ss(0) = {f_ss0} vs f_ss(100 ms) = {f_ss}");
    }

    #[test]
    fn all_zero_signal_is_degenerate() {
        let s = ScalarSeries::new(-0.05, 1.0 / 1125.0, vec![0.0; 226]).unwrap();
        let spec = cwt(&s, &ScaleGrid::default(), &[0.0, 0.1]).unwrap();
        assert!(matches!(
            normalized_slice(&spec, 0.0),
            Err(Error::DegenerateSignal(_))
        ));
    }

    #[test]
    fn identical_slices_have_zero_difference() {
        let a = slice(vec![100.0, 50.0, 10.0], vec![0.2, 0.8, 1.0]);
        let d = transient_difference(&a, &a).unwrap();
        assert!(d.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn axis_mismatch_errors() {
        let a = slice(vec![100.0, 50.0], vec![0.5, 1.0]);
        let b = slice(vec![90.0, 50.0], vec![0.5, 1.0]);
        assert!(transient_difference(&a, &b).is_err());
    }

    #[test]
    fn stationary_tone_slices_agree() {
        // a tone spanning the whole window leaves |Δw̄| < 0.1 at its own bin
        let dt = 1.0 / 1125.0;
        let n = 226;
        let samples = (0..n)
            .map(|i| (2.0 * PI * 20.0 * (-0.050 + i as f64 * dt)).sin())
            .collect();
        let s = ScalarSeries::new(-0.050, dt, samples).unwrap();
        let spec = cwt(&s, &ScaleGrid::default(), &[0.0, 0.1]).unwrap();
        let w0 = normalized_slice(&spec, 0.0).unwrap();
        let w100 = normalized_slice(&spec, 0.1).unwrap();
        let d = transient_difference(&w0, &w100).unwrap();
        let at_tone = d
            .frequencies
            .iter()
            .zip(&d.values)
            .min_by(|a, b| (a.0 - 20.0).abs().total_cmp(&(b.0 - 20.0).abs()))
            .unwrap();
        assert!(at_tone.1.abs() < 0.1, "Δw̄ at tone bin = {}", at_tone.1);
    }

    #[test]
    fn f_ss_picks_highest_crossing() {
        let a = slice(
            vec![200.0, 100.0, 30.0, 15.0, 5.0],
            vec![0.02, 0.05, 0.3, 0.9, 1.0],
        );
        assert_eq!(signal_end_frequency(&a, 0.1), 30.0);
    }

    #[test]
    fn f_ss_fallback_is_lowest_frequency() {
        let a = slice(vec![200.0, 100.0, 5.0], vec![0.05, 0.02, 0.01]);
        assert_eq!(signal_end_frequency(&a, 0.1), 5.0);
    }

    #[test]
    fn f_ss_all_crossing_returns_highest() {
        let a = slice(vec![200.0, 100.0, 5.0], vec![0.2, 0.5, 1.0]);
        assert_eq!(signal_end_frequency(&a, 0.1), 200.0);
    }

    #[test]
    fn f_n_absent_when_flat() {
        let d = TransientDifference {
            frequencies: vec![200.0, 100.0, 5.0],
            values: vec![0.0, 0.0, 0.0],
        };
        assert_eq!(noise_onset_frequency(&d, 0.1), None);
    }

    #[test]
    fn f_n_picks_lowest_crossing() {
        let d = TransientDifference {
            frequencies: vec![200.0, 120.0, 60.0, 30.0, 5.0],
            values: vec![0.4, 0.5, 0.3, 0.05, 0.01],
        };
        assert_eq!(noise_onset_frequency(&d, 0.1), Some(60.0));
    }

    #[test]
    fn f_n_everywhere_returns_lowest() {
        let d = TransientDifference {
            frequencies: vec![200.0, 60.0, 5.0],
            values: vec![0.4, 0.5, 0.3],
        };
        assert_eq!(noise_onset_frequency(&d, 0.1), Some(5.0));
    }

    #[test]
    fn cutoff_truth_table() {
        // noise-separated
        let d = cutoff_frequency(25.0, Some(80.0), 0.1, 180.0);
        assert_eq!(d.f_0, 80.0);
        assert_eq!(d.branch, CutoffBranch::NoiseSeparated);
        // overlapping
        let d = cutoff_frequency(90.0, Some(40.0), 0.1, 180.0);
        assert_eq!(d.f_0, 90.0);
        assert_eq!(d.branch, CutoffBranch::Overlapping);
        // absent noise onset
        let d = cutoff_frequency(30.0, None, 0.1, 180.0);
        assert_eq!(d.f_0, 180.0);
        assert_eq!(d.branch, CutoffBranch::Capped);
        // above the cap
        let d = cutoff_frequency(60.0, Some(400.0), 0.1, 180.0);
        assert_eq!(d.f_0, 180.0);
        assert_eq!(d.branch, CutoffBranch::Capped);
    }

    #[test]
    fn constant_passes_unchanged() {
        let dt = 1.0 / 1125.0;
        let s = ScalarSeries::new(0.0, dt, vec![3.5; 500]).unwrap();
        for mode in [FilterMode::Causal, FilterMode::ZeroPhase] {
            let y = butterworth_lowpass_scalar(&s, 60.0, 4, mode).unwrap();
            for &v in &y.samples()[y.len() / 2..] {
                assert!((v - 3.5).abs() < 1e-9, "{mode:?}: {v}");
            }
        }
    }

    fn steady_state_gain_db(order: usize, freq_ratio: f64) -> f64 {
        // cutoff well below Nyquist so bilinear warping stays inside the
        // measurement tolerance at 2x cutoff
        let fs = 1000.0;
        let f0 = 15.0;
        let f = f0 * freq_ratio;
        let dt = 1.0 / fs;
        let n = 4000;
        let x: Vec<f64> = (0..n).map(|i| (2.0 * PI * f * i as f64 * dt).sin()).collect();
        let s = ScalarSeries::new(0.0, dt, x).unwrap();
        let y = butterworth_lowpass_scalar(&s, f0, order, FilterMode::Causal).unwrap();
        // RMS amplitude over the last 2 s (an integer number of cycles)
        let tail = &y.samples()[n - 2000..];
        let rms: f64 = (tail.iter().map(|v| v * v).sum::<f64>() / tail.len() as f64).sqrt();
        20.0 * (rms * 2.0_f64.sqrt()).log10()
    }

    #[test]
    fn causal_gain_at_cutoff() {
        let db = steady_state_gain_db(4, 1.0);
        assert!((db + 3.01).abs() < 0.1, "gain at cutoff {db} dB");
    }

    #[test]
    fn causal_gain_at_twice_cutoff() {
        let db = steady_state_gain_db(4, 2.0);
        assert!((db + 24.1).abs() < 0.5, "gain at 2x cutoff {db} dB");
    }

    #[test]
    fn invalid_cutoff_rejected() {
        let s = ScalarSeries::new(0.0, 1.0 / 1125.0, vec![0.0; 64]).unwrap();
        assert!(matches!(
            butterworth_lowpass_scalar(&s, 600.0, 4, FilterMode::Causal),
            Err(Error::InvalidCutoff { .. })
        ));
    }

    #[test]
    fn zero_phase_introduces_no_lag() {
        let dt = 1.0 / 1125.0;
        let n = 1024;
        let width = 0.06;
        let center = 0.45;
        let x: Vec<f64> = (0..n)
            .map(|i| {
                let u = i as f64 * dt - (center - width / 2.0);
                if (0.0..=width).contains(&u) {
                    (PI * u / width).sin().powi(2)
                } else {
                    0.0
                }
            })
            .collect();
        let s = ScalarSeries::new(0.0, dt, x.clone()).unwrap();
        let y = butterworth_lowpass_scalar(&s, 60.0, 4, FilterMode::ZeroPhase).unwrap();
        // cross-correlation peak must sit at lag 0 ± 1 sample
        let mut best = (0_i64, f64::NEG_INFINITY);
        for lag in -20_i64..=20 {
            let mut acc = 0.0;
            for i in 0..n as i64 {
                let j = i + lag;
                if j >= 0 && j < n as i64 {
                    acc += x[i as usize] * y.samples()[j as usize];
                }
            }
            if acc > best.1 {
                best = (lag, acc);
            }
        }
        assert!(best.0.abs() <= 1, "cross-correlation peak at lag {}", best.0);
    }

    #[test]
    fn passband_energy_preserved() {
        // a signal band-limited below f0/4 loses under 1% of its energy
        let dt = 1.0 / 1125.0;
        let n = 1126;
        let x: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 * dt;
                (2.0 * PI * 8.0 * t).sin() + 0.5 * (2.0 * PI * 12.0 * t).cos()
            })
            .collect();
        let s = ScalarSeries::new(0.0, dt, x.clone()).unwrap();
        let y = butterworth_lowpass_scalar(&s, 60.0, 4, FilterMode::ZeroPhase).unwrap();
        let e_in: f64 = x.iter().map(|v| v * v).sum();
        let e_out: f64 = y.samples().iter().map(|v| v * v).sum();
        assert!(((e_out - e_in) / e_in).abs() < 0.01);
    }

    #[test]
    fn stencil_zero_on_constant() {
        let s = Vec3Series::new(0.0, 0.01, vec![[2.0, -1.0, 0.5]; 9]).unwrap();
        let d = five_point_derivative(&s).unwrap();
        assert_eq!(d.len(), 5);
        assert!(d.samples().iter().flatten().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn stencil_exact_on_quartic() {
        let dt = 0.01;
        let n = 41;
        let samples: Vec<[f64; 3]> = (0..n)
            .map(|i| {
                let t = i as f64 * dt;
                [t.powi(4), 0.0, 0.0]
            })
            .collect();
        let s = Vec3Series::new(0.0, dt, samples).unwrap();
        let d = five_point_derivative(&s).unwrap();
        for (i, v) in d.samples().iter().enumerate() {
            let t = d.time_at(i);
            let want = 4.0 * t.powi(3);
            let scale = want.abs().max(1.0);
            assert!((v[0] - want).abs() < 1e-9 * scale, "t={t}: {} vs {want}", v[0]);
        }
    }

    #[test]
    fn stencil_accuracy_on_sinusoid() {
        let dt = 1.0 / 1125.0;
        let n = 1126;
        let samples: Vec<[f64; 3]> = (0..n)
            .map(|i| {
                let t = i as f64 * dt;
                [(2.0 * PI * 5.0 * t).sin(), 0.0, 0.0]
            })
            .collect();
        let s = Vec3Series::new(0.0, dt, samples).unwrap();
        let d = five_point_derivative(&s).unwrap();
        let mut max_err = 0.0_f64;
        for (i, v) in d.samples().iter().enumerate() {
            let t = d.time_at(i);
            max_err = max_err.max((v[0] - 10.0 * PI * (2.0 * PI * 5.0 * t).cos()).abs());
        }
        assert!(max_err < 1e-5, "max error {max_err}");
    }

    #[test]
    fn stencil_requires_five_samples() {
        let s = Vec3Series::new(0.0, 0.01, vec![[1.0; 3]; 4]).unwrap();
        assert!(five_point_derivative(&s).is_err());
    }

    #[test]
    fn stencil_h4_convergence() {
        // derivative error on sin shrinks ~16x per grid halving
        let mut errors = Vec::new();
        for &n_per in &[100_usize, 200, 400] {
            let dt = 1.0 / n_per as f64;
            let n = n_per + 1;
            let samples: Vec<[f64; 3]> = (0..n)
                .map(|i| [(i as f64 * dt * 2.0 * PI).sin(), 0.0, 0.0])
                .collect();
            let s = Vec3Series::new(0.0, dt, samples).unwrap();
            let d = five_point_derivative(&s).unwrap();
            let err = d
                .samples()
                .iter()
                .enumerate()
                .map(|(i, v)| (v[0] - 2.0 * PI * (d.time_at(i) * 2.0 * PI).cos()).abs())
                .fold(0.0_f64, f64::max);
            errors.push(err);
        }
        for w in errors.windows(2) {
            let ratio = w[0] / w[1];
            assert!(ratio > 12.0 && ratio < 20.0, "convergence ratio {ratio}");
        }
    }

    proptest! {
        #[test]
        fn cutoff_never_exceeds_cap(
            f_ss in 0.5_f64..2000.0,
            f_n in proptest::option::of(0.5_f64..2000.0),
        ) {
            let d = cutoff_frequency(f_ss, f_n, 0.1, 180.0);
            prop_assert!(d.f_0 <= 180.0);
            let implied_max = f_n.map_or(f64::INFINITY, |v| v.max(f_ss));
            prop_assert_eq!(d.branch == CutoffBranch::Capped, implied_max > 180.0);
        }

        #[test]
        fn cutoff_is_monotone(
            f_ss in 1.0_f64..300.0,
            f_n in 1.0_f64..300.0,
            bump in 0.0_f64..100.0,
        ) {
            let base = cutoff_frequency(f_ss, Some(f_n), 0.1, 180.0);
            let up_ss = cutoff_frequency(f_ss + bump, Some(f_n), 0.1, 180.0);
            let up_n = cutoff_frequency(f_ss, Some(f_n + bump), 0.1, 180.0);
            prop_assert!(up_ss.f_0 >= base.f_0);
            prop_assert!(up_n.f_0 >= base.f_0);
        }
    }
}
