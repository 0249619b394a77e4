//! Uniformly sampled time-series containers shared by the whole pipeline.
//!
//! A [`Vec3Series`] holds a 3-component signal (angular velocity in rad/s or
//! linear acceleration in m/s^2) on a uniform grid with an explicit sample
//! interval `dt`. All values are immutable after construction and every
//! operation returns a new series.

use crate::error::{Error, Result};

/// Relative tolerance used when deciding whether two series share a grid.
const GRID_REL_TOL: f64 = 1e-9;

/// Small slack (in fractions of a sample) absorbing floating-point fuzz when
/// converting durations to sample counts.
const COUNT_EPS: f64 = 1e-9;

/// Uniformly sampled 3-component time series.
#[derive(Debug, Clone, PartialEq)]
pub struct Vec3Series {
    start_time: f64,
    dt: f64,
    samples: Vec<[f64; 3]>,
}

/// Uniformly sampled scalar time series (resultants, single-axis slices).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSeries {
    start_time: f64,
    dt: f64,
    samples: Vec<f64>,
}

/// Analysis window around one impact trigger.
///
/// `beta_end` marks the end of head motion (the `β = 100 ms` slice of the
/// scalogram analysis); `pre_trigger + post_trigger` is the total analysed
/// duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpactWindow {
    pub pre_trigger: f64,
    pub post_trigger: f64,
    pub beta_end: f64,
}

impl ImpactWindow {
    pub fn new(pre_trigger: f64, post_trigger: f64, beta_end: f64) -> Result<Self> {
        if !(pre_trigger >= 0.0 && pre_trigger.is_finite()) {
            return Err(Error::invalid_input("pre_trigger must be >= 0"));
        }
        if !(beta_end > 0.0 && post_trigger >= beta_end) {
            return Err(Error::invalid_input(
                "window requires post_trigger >= beta_end > 0",
            ));
        }
        Ok(Self {
            pre_trigger,
            post_trigger,
            beta_end,
        })
    }

    /// Total analysed duration.
    pub fn duration(&self) -> f64 {
        self.pre_trigger + self.post_trigger
    }
}

impl Default for ImpactWindow {
    /// 50 ms pre-trigger, 150 ms post-trigger, end of head motion at 100 ms.
    fn default() -> Self {
        Self {
            pre_trigger: 0.050,
            post_trigger: 0.150,
            beta_end: 0.100,
        }
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid_input(format!("dt must be positive, got {dt}")));
    }
    Ok(())
}

impl Vec3Series {
    pub fn new(start_time: f64, dt: f64, samples: Vec<[f64; 3]>) -> Result<Self> {
        check_dt(dt)?;
        if !start_time.is_finite() {
            return Err(Error::invalid_input("start_time must be finite"));
        }
        if samples.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid_input("samples must be finite"));
        }
        Ok(Self {
            start_time,
            dt,
            samples,
        })
    }

    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.dt
    }

    pub fn samples(&self) -> &[[f64; 3]] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time_at(&self, index: usize) -> f64 {
        self.start_time + index as f64 * self.dt
    }

    pub fn end_time(&self) -> f64 {
        match self.samples.len() {
            0 => self.start_time,
            n => self.time_at(n - 1),
        }
    }

    /// Shift the time axis so that `t = 0` lands at `new_zero` (samples are
    /// untouched). Used to express windows in trigger-relative β time.
    pub fn rebased(&self, new_zero: f64) -> Vec3Series {
        Vec3Series {
            start_time: self.start_time - new_zero,
            dt: self.dt,
            samples: self.samples.clone(),
        }
    }

    /// True when `other` shares this series' grid (dt, start and length).
    pub fn same_grid(&self, other: &Vec3Series) -> bool {
        same_grid(
            self.start_time,
            self.dt,
            self.len(),
            other.start_time,
            other.dt,
            other.len(),
        )
    }

    /// Linear interpolation onto a uniform grid with the same start time.
    ///
    /// When `target_dt` equals the current interval the series is returned
    /// unchanged (bit-identical samples).
    pub fn resample(&self, target_dt: f64) -> Result<Vec3Series> {
        check_dt(target_dt)?;
        if self.is_empty() {
            return Err(Error::invalid_input("cannot resample an empty series"));
        }
        if (target_dt - self.dt).abs() <= GRID_REL_TOL * self.dt {
            return Ok(self.clone());
        }
        let duration = (self.len() - 1) as f64 * self.dt;
        let n_new = (duration / target_dt + COUNT_EPS).floor() as usize + 1;
        let samples = (0..n_new)
            .map(|i| self.interp_at(self.start_time + i as f64 * target_dt))
            .collect();
        Ok(Vec3Series {
            start_time: self.start_time,
            dt: target_dt,
            samples,
        })
    }

    /// Linear interpolation onto an explicit grid. The grid must lie within
    /// the recorded span (up to a fraction of a sample of slack).
    pub fn interp_onto(&self, start: f64, dt: f64, n: usize) -> Result<Vec3Series> {
        check_dt(dt)?;
        if self.is_empty() {
            return Err(Error::invalid_input("cannot resample an empty series"));
        }
        let end = start + (n.saturating_sub(1)) as f64 * dt;
        let slack = self.dt * 1e-6;
        if start < self.start_time - slack || end > self.end_time() + slack {
            return Err(Error::out_of_range(format!(
                "grid [{start}, {end}] exceeds recording [{}, {}]",
                self.start_time,
                self.end_time()
            )));
        }
        let samples = (0..n)
            .map(|i| self.interp_at(start + i as f64 * dt))
            .collect();
        Ok(Vec3Series {
            start_time: start,
            dt,
            samples,
        })
    }

    fn interp_at(&self, t: f64) -> [f64; 3] {
        let pos = (t - self.start_time) / self.dt;
        if pos <= 0.0 {
            return self.samples[0];
        }
        let last = self.len() - 1;
        if pos >= last as f64 {
            return self.samples[last];
        }
        let k = pos.floor() as usize;
        let frac = pos - k as f64;
        let a = self.samples[k];
        let b = self.samples[k + 1];
        [
            a[0] + frac * (b[0] - a[0]),
            a[1] + frac * (b[1] - a[1]),
            a[2] + frac * (b[2] - a[2]),
        ]
    }

    /// Slice out the analysis window around `trigger_time`.
    ///
    /// The returned series spans `[trigger - pre_trigger, trigger +
    /// post_trigger]` on the original grid; the sample at β = 0 is the grid
    /// point nearest `trigger_time`.
    pub fn extract_window(&self, trigger_time: f64, window: &ImpactWindow) -> Result<Vec3Series> {
        if self.is_empty() {
            return Err(Error::invalid_input("cannot window an empty series"));
        }
        let trigger_index = ((trigger_time - self.start_time) / self.dt).round();
        let n_pre = (window.pre_trigger / self.dt + COUNT_EPS).floor() as i64;
        let total = (window.duration() / self.dt + COUNT_EPS).floor() as i64 + 1;
        let first = trigger_index as i64 - n_pre;
        let last = first + total - 1;
        if first < 0 || last >= self.len() as i64 {
            return Err(Error::out_of_range(format!(
                "window [{}, {}] samples exceeds recording of {} samples",
                first,
                last,
                self.len()
            )));
        }
        let first = first as usize;
        let samples = self.samples[first..=last as usize].to_vec();
        Ok(Vec3Series {
            start_time: self.time_at(first),
            dt: self.dt,
            samples,
        })
    }

    /// Per-sample Euclidean norm.
    pub fn resultant(&self) -> Result<ScalarSeries> {
        if self.is_empty() {
            return Err(Error::invalid_input("cannot take resultant of empty series"));
        }
        let samples = self
            .samples
            .iter()
            .map(|v| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt())
            .collect();
        Ok(ScalarSeries {
            start_time: self.start_time,
            dt: self.dt,
            samples,
        })
    }

    /// Single-axis slice (axis 0 = x, 1 = y, 2 = z).
    pub fn component(&self, axis: usize) -> ScalarSeries {
        assert!(axis < 3, "axis index out of range");
        ScalarSeries {
            start_time: self.start_time,
            dt: self.dt,
            samples: self.samples.iter().map(|v| v[axis]).collect(),
        }
    }

    /// Apply a per-sample map, keeping the grid.
    pub fn map_samples(&self, f: impl Fn(&[f64; 3]) -> [f64; 3]) -> Vec3Series {
        Vec3Series {
            start_time: self.start_time,
            dt: self.dt,
            samples: self.samples.iter().map(f).collect(),
        }
    }

    /// Build a series from three per-axis sample vectors sharing this grid.
    pub fn from_axes(start_time: f64, dt: f64, x: &[f64], y: &[f64], z: &[f64]) -> Result<Vec3Series> {
        if x.len() != y.len() || y.len() != z.len() {
            return Err(Error::invalid_input("axis lengths differ"));
        }
        let samples = x
            .iter()
            .zip(y)
            .zip(z)
            .map(|((&a, &b), &c)| [a, b, c])
            .collect();
        Vec3Series::new(start_time, dt, samples)
    }
}

impl ScalarSeries {
    pub fn new(start_time: f64, dt: f64, samples: Vec<f64>) -> Result<Self> {
        check_dt(dt)?;
        if !start_time.is_finite() {
            return Err(Error::invalid_input("start_time must be finite"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid_input("samples must be finite"));
        }
        Ok(Self {
            start_time,
            dt,
            samples,
        })
    }

    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time_at(&self, index: usize) -> f64 {
        self.start_time + index as f64 * self.dt
    }

    pub fn end_time(&self) -> f64 {
        match self.samples.len() {
            0 => self.start_time,
            n => self.time_at(n - 1),
        }
    }

    /// Maximum sample value (0 for an empty series).
    pub fn max_value(&self) -> f64 {
        self.samples.iter().cloned().fold(0.0_f64, f64::max)
    }

    /// Maximum over samples with `time >= from`.
    pub fn max_from(&self, from: f64) -> f64 {
        self.samples
            .iter()
            .enumerate()
            .filter(|(i, _)| self.time_at(*i) >= from - self.dt * 0.5)
            .map(|(_, &v)| v)
            .fold(0.0_f64, f64::max)
    }

    pub fn same_grid(&self, other: &ScalarSeries) -> bool {
        same_grid(
            self.start_time,
            self.dt,
            self.len(),
            other.start_time,
            other.dt,
            other.len(),
        )
    }
}

fn same_grid(s1: f64, dt1: f64, n1: usize, s2: f64, dt2: f64, n2: usize) -> bool {
    n1 == n2 && (dt1 - dt2).abs() <= GRID_REL_TOL * dt1 && (s1 - s2).abs() <= 1e-6 * dt1
}
