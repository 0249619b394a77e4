//! Discretized continuous wavelet transform with a Gabor wavelet.
//!
//! The transform is
//!
//! ```text
//! w(β,η) = (1/√η) ∫ x(τ) conj(ψ((τ−β)/(η·Δτ))) dτ
//! ```
//!
//! evaluated by a rectangle rule over the recorded window, where
//! `ψ(u) = e^{i·15u} / (π^¼ · e^{u²/2})`. The scale axis is an octave/voice
//! grid `η(oct, voc) = α·2^(oct−1)·2^(voc/40)` and maps to frequency via
//! `f(η) = f_c / (η·Δτ)` with central frequency `f_c = 15/(2π) ≈ 2.39`.
//!
//! The scale argument is measured in samples (`(τ−β)/Δτ` divided by `η`), so
//! a scale η corresponds to a Gaussian envelope of standard deviation `η·Δτ`
//! seconds; this is the convention under which the `f(η)` mapping above
//! holds.
//!
//! Coefficients are computed on the full grid even where `f(η)` exceeds the
//! Nyquist frequency; those bins are flagged so the cutoff-selection logic
//! can skip them. Coefficients whose truncated wavelet support spills past
//! the recorded window are reported as edge-affected.

use crate::error::{Error, Result};
use crate::series::ScalarSeries;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Modulation constant of the Gabor wavelet (`e^{i·15τ}` carrier).
pub const GABOR_MODULATION: f64 = 15.0;

/// Half-width (in scale units) beyond which the Gaussian envelope falls
/// below 1e-8 and the wavelet is truncated: exp(-u²/2) < 1e-8 for |u| > 6.07.
pub const ENVELOPE_CUTOFF: f64 = 6.07;

/// Gabor wavelet `ψ(τ) = e^{i·15τ} / (π^¼ · e^{τ²/2})`.
pub fn gabor(tau: f64) -> Complex64 {
    let envelope = (-tau * tau / 2.0).exp() / PI.powf(0.25);
    Complex64::from_polar(envelope, GABOR_MODULATION * tau)
}

/// Central frequency of the Gabor wavelet, `15/(2π) ≈ 2.3873`.
pub fn central_frequency() -> f64 {
    GABOR_MODULATION / (2.0 * PI)
}

/// Octave/voice scale grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleGrid {
    alpha: f64,
    octaves: usize,
    voices: usize,
    etas: Vec<f64>,
}

impl ScaleGrid {
    pub fn new(alpha: f64, octaves: usize, voices: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Config(format!("scale grid alpha must be positive, got {alpha}")));
        }
        if octaves == 0 || voices == 0 {
            return Err(Error::Config("scale grid needs at least one octave and one voice".into()));
        }
        let mut etas = Vec::with_capacity(octaves * voices);
        for oct in 1..=octaves {
            for voc in 1..=voices {
                etas.push(alpha * 2.0_f64.powi(oct as i32 - 1) * 2.0_f64.powf(voc as f64 / voices as f64));
            }
        }
        debug_assert!(etas.windows(2).all(|w| w[0] < w[1]));
        Ok(Self {
            alpha,
            octaves,
            voices,
            etas,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn octaves(&self) -> usize {
        self.octaves
    }

    pub fn voices(&self) -> usize {
        self.voices
    }

    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    pub fn len(&self) -> usize {
        self.etas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.etas.is_empty()
    }
}

impl Default for ScaleGrid {
    /// `α = 1.92`, 10 octaves, 40 voices (400 scales).
    fn default() -> Self {
        ScaleGrid::new(1.92, 10, 40).expect("default grid is valid")
    }
}

/// Complex CWT coefficients over (β, η).
#[derive(Debug, Clone)]
pub struct WaveletSpectrum {
    betas: Vec<f64>,
    grid: ScaleGrid,
    /// Row-major: `coefficients[beta_index][eta_index]`.
    coefficients: Vec<Vec<Complex64>>,
    dt: f64,
    central_frequency: f64,
    signal_start: f64,
    signal_end: f64,
}

impl WaveletSpectrum {
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn grid(&self) -> &ScaleGrid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn central_frequency(&self) -> f64 {
        self.central_frequency
    }

    pub fn coefficient(&self, beta_index: usize, eta_index: usize) -> Complex64 {
        self.coefficients[beta_index][eta_index]
    }

    pub fn coefficients(&self) -> &[Vec<Complex64>] {
        &self.coefficients
    }

    /// Frequency associated with a scale index: `f(η) = f_c/(η·Δτ)`.
    /// Strictly decreasing in η.
    pub fn frequency(&self, eta_index: usize) -> f64 {
        self.central_frequency / (self.grid.etas[eta_index] * self.dt)
    }

    /// Full frequency axis (descending).
    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|i| self.frequency(i)).collect()
    }

    pub fn nyquist(&self) -> f64 {
        0.5 / self.dt
    }

    /// Bins whose mapped frequency exceeds Nyquist are flagged; downstream
    /// thresholds must not act on them.
    pub fn is_above_nyquist(&self, eta_index: usize) -> bool {
        self.frequency(eta_index) > self.nyquist()
    }

    /// True when the truncated wavelet support at (β, η) extends past the
    /// recorded window, so the coefficient was computed on partial data.
    pub fn is_edge_affected(&self, beta_index: usize, eta_index: usize) -> bool {
        let half = ENVELOPE_CUTOFF * self.grid.etas[eta_index] * self.dt;
        let beta = self.betas[beta_index];
        beta - half < self.signal_start || beta + half > self.signal_end
    }

    /// Index of the β grid point nearest `beta` (must land within half a
    /// sample).
    pub fn beta_index(&self, beta: f64) -> Result<usize> {
        let (idx, dist) = self
            .betas
            .iter()
            .enumerate()
            .map(|(i, &b)| (i, (b - beta).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| Error::invalid_input("spectrum has no beta samples"))?;
        if dist > self.dt * 0.5 + 1e-12 {
            return Err(Error::out_of_range(format!(
                "beta {beta} is not on the spectrum grid (nearest {})",
                self.betas[idx]
            )));
        }
        Ok(idx)
    }

    /// Coefficient magnitudes `|w(β,η)|` plus the frequency axis.
    pub fn scalogram(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mags = self
            .coefficients
            .iter()
            .map(|row| row.iter().map(|c| c.norm()).collect())
            .collect();
        (mags, self.frequencies())
    }

    /// Magnitudes of one β column.
    pub fn magnitude_slice(&self, beta_index: usize) -> Vec<f64> {
        self.coefficients[beta_index].iter().map(|c| c.norm()).collect()
    }
}

fn validate_cwt_inputs(signal: &ScalarSeries, grid: &ScaleGrid, betas: &[f64]) -> Result<()> {
    if signal.is_empty() {
        return Err(Error::invalid_input("cannot transform an empty signal"));
    }
    if grid.is_empty() {
        return Err(Error::invalid_input("empty scale grid"));
    }
    let slack = signal.dt() * 0.5 + 1e-12;
    for &b in betas {
        if b < signal.start_time() - slack || b > signal.end_time() + slack {
            return Err(Error::out_of_range(format!(
                "beta {b} outside signal span [{}, {}]",
                signal.start_time(),
                signal.end_time()
            )));
        }
    }
    Ok(())
}

/// Brute-force CWT at the requested β shifts.
///
/// The wavelet is truncated where its Gaussian envelope falls below 1e-8
/// ([`ENVELOPE_CUTOFF`]); columns are computed in parallel.
pub fn cwt(signal: &ScalarSeries, grid: &ScaleGrid, betas: &[f64]) -> Result<WaveletSpectrum> {
    validate_cwt_inputs(signal, grid, betas)?;
    let dt = signal.dt();
    let start = signal.start_time();
    let x = signal.samples();
    let n = x.len();
    let inv_quartic_pi = 1.0 / PI.powf(0.25);
    let coefficients: Vec<Vec<Complex64>> = betas
        .par_iter()
        .map(|&beta| {
            grid.etas()
                .iter()
                .map(|&eta| {
                    let scale = eta * dt;
                    let half = ENVELOPE_CUTOFF * scale;
                    let k_min = (((beta - half) - start) / dt).ceil().max(0.0) as usize;
                    let k_max = ((((beta + half) - start) / dt).floor() as i64).min(n as i64 - 1);
                    let mut sum = Complex64::new(0.0, 0.0);
                    let mut k = k_min as i64;
                    while k <= k_max {
                        let t = start + k as f64 * dt;
                        let u = (t - beta) / scale;
                        let envelope = (-u * u / 2.0).exp() * inv_quartic_pi;
                        // conj(psi(u)) = envelope * e^{-i 15 u}
                        sum += x[k as usize] * Complex64::from_polar(envelope, -GABOR_MODULATION * u);
                        k += 1;
                    }
                    sum * (dt / eta.sqrt())
                })
                .collect()
        })
        .collect();
    Ok(WaveletSpectrum {
        betas: betas.to_vec(),
        grid: grid.clone(),
        coefficients,
        dt,
        central_frequency: central_frequency(),
        signal_start: signal.start_time(),
        signal_end: signal.end_time(),
    })
}

/// FFT-accelerated CWT over the signal's full sample grid.
///
/// Uses the same truncated kernel as [`cwt`], so the two agree to FFT
/// rounding (well below 1e-9 relative).
pub fn cwt_fft(signal: &ScalarSeries, grid: &ScaleGrid) -> Result<WaveletSpectrum> {
    let betas: Vec<f64> = (0..signal.len()).map(|i| signal.time_at(i)).collect();
    validate_cwt_inputs(signal, grid, &betas)?;
    let dt = signal.dt();
    let x = signal.samples();
    let n = x.len();
    let inv_quartic_pi = 1.0 / PI.powf(0.25);

    // Per-eta cross-correlation of x with the sampled kernel, via FFT.
    let columns: Vec<Vec<Complex64>> = grid
        .etas()
        .par_iter()
        .map(|&eta| {
            let half_samples = ((ENVELOPE_CUTOFF * eta).floor() as usize).max(1);
            let m = half_samples.min(n.saturating_sub(1).max(1));
            // kernel h[j] = conj(psi(j/eta)) * dt / sqrt(eta), j in [-m, m]
            let kernel: Vec<Complex64> = (-(m as i64)..=m as i64)
                .map(|j| {
                    let u = j as f64 / eta;
                    let envelope = (-u * u / 2.0).exp() * inv_quartic_pi;
                    Complex64::from_polar(envelope, -GABOR_MODULATION * u) * (dt / eta.sqrt())
                })
                .collect();
            // w[k] = sum_j x[k+j] h[j+m]  ==  conv(x, reverse(h))[k + m]
            let len = (n + kernel.len() - 1).next_power_of_two();
            let mut planner = FftPlanner::new();
            let fft = planner.plan_fft_forward(len);
            let ifft = planner.plan_fft_inverse(len);
            let mut fx: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            fx.resize(len, Complex64::new(0.0, 0.0));
            let mut fh: Vec<Complex64> = kernel.iter().rev().cloned().collect();
            fh.resize(len, Complex64::new(0.0, 0.0));
            fft.process(&mut fx);
            fft.process(&mut fh);
            for (a, b) in fx.iter_mut().zip(&fh) {
                *a *= b;
            }
            ifft.process(&mut fx);
            let norm = 1.0 / len as f64;
            (0..n).map(|k| fx[k + m] * norm).collect()
        })
        .collect();

    // transpose to [beta][eta]
    let coefficients: Vec<Vec<Complex64>> = (0..n)
        .map(|b| columns.iter().map(|col| col[b]).collect())
        .collect();
    Ok(WaveletSpectrum {
        betas,
        grid: grid.clone(),
        coefficients,
        dt,
        central_frequency: central_frequency(),
        signal_start: signal.start_time(),
        signal_end: signal.end_time(),
    })
}
