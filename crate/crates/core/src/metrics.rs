//! Agreement statistics between reconstructed and reference kinematics.
//!
//! Peak comparisons are normalized by the maximum reference value before any
//! statistic is computed. Pearson r, the concordance correlation coefficient
//! and NRMSE follow the usual summation formulas; Bland-Altman reports the
//! mean difference (reference minus candidate, so negative bias means the
//! candidate over-predicts) with 1.96-SD limits of agreement. Curve-level
//! agreement uses a simplified corridor/cross-correlation rating binned into
//! excellent/good/fair/marginal/unacceptable.

use crate::config::CoraConfig;
use crate::error::{Error, Result};
use crate::filtering::five_point_derivative;
use crate::series::{ScalarSeries, Vec3Series};
use serde::{Deserialize, Serialize};

/// Paired peak values (reference `x_i`, candidate `y_i`).
#[derive(Debug, Clone, PartialEq)]
pub struct PairedPeaks {
    reference: Vec<f64>,
    candidate: Vec<f64>,
    normalization: f64,
}

impl PairedPeaks {
    pub fn new(reference: Vec<f64>, candidate: Vec<f64>) -> Result<Self> {
        if reference.len() != candidate.len() {
            return Err(Error::invalid_input("paired lists must have equal length"));
        }
        if reference.is_empty() {
            return Err(Error::invalid_input("need at least 1 paired peak"));
        }
        let normalization = reference.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !(normalization > 0.0) {
            return Err(Error::invalid_input(
                "maximum reference value must be positive for normalization",
            ));
        }
        Ok(Self {
            reference,
            candidate,
            normalization,
        })
    }

    pub fn len(&self) -> usize {
        self.reference.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reference.is_empty()
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Reference and candidate lists divided by the maximum reference value.
    pub fn normalized(&self) -> (Vec<f64>, Vec<f64>) {
        let x = self.reference.iter().map(|v| v / self.normalization).collect();
        let y = self.candidate.iter().map(|v| v / self.normalization).collect();
        (x, y)
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation (n − 1 denominator).
fn sample_sd(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

/// Pearson correlation coefficient.
pub fn pearson_r(pairs: &PairedPeaks) -> Result<f64> {
    let (x, y) = pairs.normalized();
    let (mx, my) = (mean(&x), mean(&y));
    let num: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let dx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum::<f64>().sqrt();
    let dy: f64 = y.iter().map(|b| (b - my).powi(2)).sum::<f64>().sqrt();
    if dx == 0.0 || dy == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "one of the inputs has zero variance".into(),
        ));
    }
    Ok(num / (dx * dy))
}

/// Concordance correlation coefficient, `2ρ / (μ + 1/μ + u²)` with
/// `μ = S_x/S_y` and `u = (x̄ − ȳ)/√(S_x S_y)`.
pub fn ccc(pairs: &PairedPeaks) -> Result<f64> {
    let rho = pearson_r(pairs)?;
    let (x, y) = pairs.normalized();
    let (sx, sy) = (sample_sd(&x), sample_sd(&y));
    if sx == 0.0 || sy == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "one of the inputs has zero variance".into(),
        ));
    }
    let mu = sx / sy;
    let u = (mean(&x) - mean(&y)) / (sx * sy).sqrt();
    Ok(2.0 * rho / (mu + 1.0 / mu + u * u))
}

/// Root mean square of the per-pair relative errors `(y_i − x_i)/x_i`.
pub fn nrmse(pairs: &PairedPeaks) -> Result<f64> {
    let (x, y) = pairs.normalized();
    let mut acc = 0.0;
    for (a, b) in x.iter().zip(&y) {
        if *a == 0.0 {
            return Err(Error::DivisionByZero(
                "NRMSE undefined when a reference value is zero".into(),
            ));
        }
        acc += ((b - a) / a).powi(2);
    }
    Ok((acc / x.len() as f64).sqrt())
}

/// Bias and limits of agreement of the normalized differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlandAltman {
    pub mean_bias: f64,
    pub sd: f64,
    pub loa_lower: f64,
    pub loa_upper: f64,
}

/// Differences are reference minus candidate on normalized data.
pub fn bland_altman(pairs: &PairedPeaks) -> Result<BlandAltman> {
    let (x, y) = pairs.normalized();
    let d: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
    let mean_bias = mean(&d);
    // a single pair has a defined bias but no spread estimate
    let sd = if d.len() < 2 { 0.0 } else { sample_sd(&d) };
    Ok(BlandAltman {
        mean_bias,
        sd,
        loa_lower: mean_bias - 1.96 * sd,
        loa_upper: mean_bias + 1.96 * sd,
    })
}

/// Biofidelity bin for a curve-rating score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoraBin {
    Excellent,
    Good,
    Fair,
    Marginal,
    Unacceptable,
}

impl std::fmt::Display for CoraBin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CoraBin::Excellent => "excellent",
            CoraBin::Good => "good",
            CoraBin::Fair => "fair",
            CoraBin::Marginal => "marginal",
            CoraBin::Unacceptable => "unacceptable",
        })
    }
}

/// Pure, total map from score to biofidelity bin.
pub fn cora_bin(score: f64) -> CoraBin {
    if score > 0.86 {
        CoraBin::Excellent
    } else if score >= 0.66 {
        CoraBin::Good
    } else if score >= 0.44 {
        CoraBin::Fair
    } else if score >= 0.26 {
        CoraBin::Marginal
    } else {
        CoraBin::Unacceptable
    }
}

/// Curve rating with its sub-scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoraRating {
    pub score: f64,
    pub bin: CoraBin,
    pub corridor: f64,
    pub shape: f64,
    pub size: f64,
    pub phase: f64,
}

/// Simplified corridor/correlation curve rating over the first 100 ms.
///
/// The corridor sub-score awards 1 inside an inner corridor of
/// `inner_frac × max|reference|`, 0 outside the outer corridor, linear in
/// between, averaged over the evaluation interval (where the reference
/// exceeds `eval_threshold_frac` of its peak). The correlation group scores
/// shape (normalized cross-correlation at the best lag), size (energy
/// ratio) and phase (best-lag offset), equally weighted.
pub fn cora_score(
    reference: &ScalarSeries,
    candidate: &ScalarSeries,
    cfg: &CoraConfig,
) -> Result<CoraRating> {
    cfg.validate()?;
    if !reference.same_grid(candidate) {
        return Err(Error::invalid_input(
            "reference and candidate must share a sample grid",
        ));
    }
    let dt = reference.dt();
    // restrict to [0, 100 ms]
    let keep: Vec<usize> = (0..reference.len())
        .filter(|&i| {
            let t = reference.time_at(i);
            t >= -dt * 0.5 && t <= 0.100 + dt * 0.5
        })
        .collect();
    if keep.len() < 4 {
        return Err(Error::invalid_input(
            "series must cover the 0-100 ms rating interval",
        ));
    }
    let x: Vec<f64> = keep.iter().map(|&i| reference.samples()[i]).collect();
    let y: Vec<f64> = keep.iter().map(|&i| candidate.samples()[i]).collect();
    let peak = x.iter().map(|v| v.abs()).fold(0.0_f64, f64::max);
    if peak == 0.0 {
        return Err(Error::DegenerateSignal("reference curve is identically zero".into()));
    }

    // evaluation interval: first to last sample above the threshold fraction
    let thr = cfg.eval_threshold_frac * peak;
    let first = x.iter().position(|v| v.abs() >= thr).unwrap();
    let last = x.iter().rposition(|v| v.abs() >= thr).unwrap();
    let xr = &x[first..=last];
    let yr = &y[first..=last];

    // corridor sub-score
    let inner = cfg.inner_frac * peak;
    let outer = cfg.outer_frac * peak;
    let corridor = xr
        .iter()
        .zip(yr)
        .map(|(a, b)| {
            let d = (a - b).abs();
            if d <= inner {
                1.0
            } else if d >= outer {
                0.0
            } else {
                1.0 - (d - inner) / (outer - inner)
            }
        })
        .sum::<f64>()
        / xr.len() as f64;

    // correlation group
    let ex: f64 = xr.iter().map(|v| v * v).sum();
    let ey: f64 = yr.iter().map(|v| v * v).sum();
    let (shape, size, phase) = if ey == 0.0 {
        (0.0, 0.0, 0.0)
    } else {
        let max_lag = ((cfg.max_phase_shift / dt).round() as i64).min(xr.len() as i64 - 1);
        let mut best = (0_i64, f64::NEG_INFINITY);
        for lag in -max_lag..=max_lag {
            let mut acc = 0.0;
            for i in 0..xr.len() as i64 {
                let j = i + lag;
                if j >= 0 && (j as usize) < yr.len() {
                    acc += xr[i as usize] * yr[j as usize];
                }
            }
            let r = acc / (ex * ey).sqrt();
            if r > best.1 {
                best = (lag, r);
            }
        }
        let shape = best.1.clamp(0.0, 1.0);
        let size = (ex.min(ey) / ex.max(ey)).sqrt();
        let phase = (1.0 - (best.0.abs() as f64 * dt) / cfg.max_phase_shift).clamp(0.0, 1.0);
        (shape, size, phase)
    };

    let score = (cfg.corridor_weight * corridor
        + (1.0 - cfg.corridor_weight) * (shape + size + phase) / 3.0)
        .clamp(0.0, 1.0);
    Ok(CoraRating {
        score,
        bin: cora_bin(score),
        corridor,
        shape,
        size,
        phase,
    })
}

/// Peak resultant values (PRV, PRA) of a raw angular-velocity series,
/// searching from t = 0 onward. PRA comes from the five-point stencil.
pub fn peak_metrics(angular_velocity: &Vec3Series) -> Result<(f64, f64)> {
    let prv = angular_velocity.resultant()?.max_from(0.0);
    let accel = five_point_derivative(angular_velocity)?;
    let pra = accel.resultant()?.max_from(0.0);
    Ok((prv, pra))
}
