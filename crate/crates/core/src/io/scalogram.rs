//! Scalogram export: a plain CSV of coefficient magnitudes and an SVG
//! heatmap with the conventional log-spaced frequency axis.

use crate::error::{Error, Result};
use crate::wavelet::WaveletSpectrum;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::io(path.display().to_string(), e)
}

/// Magnitude matrix as CSV: first column the frequency axis in Hz
/// (descending), remaining columns one β each (header in milliseconds).
pub fn write_scalogram_csv(spectrum: &WaveletSpectrum, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (magnitudes, frequencies) = spectrum.scalogram();
    let file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let mut header = String::from("frequency_hz");
    for beta in spectrum.betas() {
        write!(header, ",{}", beta * 1000.0).unwrap();
    }
    writeln!(out, "{header}").map_err(|e| io_err(path, e))?;
    for (eta_index, &freq) in frequencies.iter().enumerate() {
        let mut line = format!("{freq}");
        for row in &magnitudes {
            write!(line, ",{}", row[eta_index]).unwrap();
        }
        writeln!(out, "{line}").map_err(|e| io_err(path, e))?;
    }
    out.flush().map_err(|e| io_err(path, e))
}

/// Five-anchor color ramp (dark blue → yellow) over a normalized magnitude.
fn ramp(v: f64) -> (u8, u8, u8) {
    const ANCHORS: [(f64, [f64; 3]); 5] = [
        (0.00, [13.0, 8.0, 84.0]),
        (0.25, [84.0, 39.0, 143.0]),
        (0.50, [185.0, 50.0, 137.0]),
        (0.75, [244.0, 109.0, 69.0]),
        (1.00, [252.0, 253.0, 136.0]),
    ];
    let v = v.clamp(0.0, 1.0);
    let mut color = ANCHORS[0].1;
    for pair in ANCHORS.windows(2) {
        let (t0, c0) = pair[0];
        let (t1, c1) = pair[1];
        if v >= t0 && v <= t1 {
            let u = (v - t0) / (t1 - t0);
            color = [
                c0[0] + u * (c1[0] - c0[0]),
                c0[1] + u * (c1[1] - c0[1]),
                c0[2] + u * (c1[2] - c0[2]),
            ];
        }
    }
    (color[0] as u8, color[1] as u8, color[2] as u8)
}

/// Half-open index ranges of the source matrix backing each pooled cell.
type PoolBins = Vec<(usize, usize)>;

/// Max-pool the magnitude matrix down to at most `max_cols` × `max_rows`
/// cells so the SVG stays a reasonable size while ridges survive.
fn pool(
    magnitudes: &[Vec<f64>],
    max_cols: usize,
    max_rows: usize,
) -> (Vec<Vec<f64>>, PoolBins, PoolBins) {
    let n_beta = magnitudes.len();
    let n_eta = magnitudes[0].len();
    let split = |n: usize, max: usize| -> Vec<(usize, usize)> {
        let bins = n.min(max);
        (0..bins)
            .map(|b| (b * n / bins, ((b + 1) * n / bins).max(b * n / bins + 1)))
            .collect()
    };
    let col_bins = split(n_beta, max_cols);
    let row_bins = split(n_eta, max_rows);
    let mut cells = vec![vec![0.0; col_bins.len()]; row_bins.len()];
    for (ri, &(e0, e1)) in row_bins.iter().enumerate() {
        for (ci, &(b0, b1)) in col_bins.iter().enumerate() {
            let mut best = 0.0_f64;
            for row in &magnitudes[b0..b1] {
                for &m in &row[e0..e1] {
                    best = best.max(m);
                }
            }
            cells[ri][ci] = best;
        }
    }
    (cells, col_bins, row_bins)
}

/// Heatmap of the scalogram: β (milliseconds) on a linear horizontal axis,
/// frequency on a log-spaced vertical axis, highest frequency on top.
pub fn write_scalogram_svg(spectrum: &WaveletSpectrum, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (magnitudes, frequencies) = spectrum.scalogram();
    if magnitudes.is_empty() || frequencies.is_empty() {
        return Err(Error::invalid_input("empty spectrum"));
    }
    let betas = spectrum.betas();
    let (cells, col_bins, row_bins) = pool(&magnitudes, 220, 160);

    const LEFT: f64 = 70.0;
    const TOP: f64 = 20.0;
    const PLOT_W: f64 = 720.0;
    const PLOT_H: f64 = 440.0;
    const BOTTOM_PAD: f64 = 50.0;

    let beta_lo = betas[0];
    let beta_hi = *betas.last().unwrap();
    let beta_span = (beta_hi - beta_lo).max(f64::MIN_POSITIVE);
    let log_hi = frequencies[0].log10();
    let log_lo = frequencies.last().unwrap().log10();
    let log_span = (log_hi - log_lo).max(f64::MIN_POSITIVE);
    let x_of = |beta: f64| LEFT + (beta - beta_lo) / beta_span * PLOT_W;
    let y_of = |freq: f64| TOP + (log_hi - freq.log10()) / log_span * PLOT_H;

    let peak = cells
        .iter()
        .flatten()
        .fold(0.0_f64, |a, &b| a.max(b))
        .max(f64::MIN_POSITIVE);

    let mut svg = String::new();
    let width = LEFT + PLOT_W + 20.0;
    let height = TOP + PLOT_H + BOTTOM_PAD;
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#).unwrap();

    let beta_edge = |bin: &(usize, usize), side: usize| -> f64 {
        // cell edges at midpoints between neighbouring β samples
        let idx = if side == 0 { bin.0 } else { bin.1 - 1 };
        let b = betas[idx];
        if side == 0 {
            if idx == 0 { b } else { 0.5 * (b + betas[idx - 1]) }
        } else if idx + 1 == betas.len() {
            b
        } else {
            0.5 * (b + betas[idx + 1])
        }
    };
    let freq_edge = |bin: &(usize, usize), side: usize| -> f64 {
        let idx = if side == 0 { bin.0 } else { bin.1 - 1 };
        let f = frequencies[idx];
        if side == 0 {
            if idx == 0 { f } else { (f * frequencies[idx - 1]).sqrt() }
        } else if idx + 1 == frequencies.len() {
            f
        } else {
            (f * frequencies[idx + 1]).sqrt()
        }
    };

    for (ri, row_bin) in row_bins.iter().enumerate() {
        let y0 = y_of(freq_edge(row_bin, 0));
        let y1 = y_of(freq_edge(row_bin, 1));
        for (ci, col_bin) in col_bins.iter().enumerate() {
            let x0 = x_of(beta_edge(col_bin, 0));
            let x1 = x_of(beta_edge(col_bin, 1));
            let (r, g, b) = ramp(cells[ri][ci] / peak);
            writeln!(
                svg,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({r},{g},{b})"/>"#,
                x0,
                y0,
                x1 - x0,
                y1 - y0
            )
            .unwrap();
        }
    }

    // decade ticks on the log frequency axis
    let mut decade = 10f64.powf(log_lo.ceil());
    while decade.log10() <= log_hi + 1e-9 {
        let y = y_of(decade);
        writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#,
            LEFT - 6.0
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="12">{decade}</text>"#,
            LEFT - 9.0,
            y + 4.0
        )
        .unwrap();
        decade *= 10.0;
    }
    for k in 0..=4 {
        let beta = beta_lo + beta_span * k as f64 / 4.0;
        let x = x_of(beta);
        let y = TOP + PLOT_H;
        writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            y + 6.0
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="12">{:.0}</text>"#,
            y + 20.0,
            beta * 1000.0
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">time shift [ms]</text>"#,
        LEFT + PLOT_W / 2.0,
        TOP + PLOT_H + 40.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" font-size="13" transform="rotate(-90 16 {:.2})">frequency [Hz]</text>"#,
        TOP + PLOT_H / 2.0,
        TOP + PLOT_H / 2.0
    )
    .unwrap();
    writeln!(svg, "</svg>").unwrap();

    std::fs::write(path, svg).map_err(|e| io_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::ScalarSeries;
    use crate::wavelet::{cwt_fft, ScaleGrid};

    fn tone_spectrum() -> WaveletSpectrum {
        let dt = 1.0 / 1125.0;
        let samples: Vec<f64> = (0..563)
            .map(|k| (2.0 * std::f64::consts::PI * 30.0 * k as f64 * dt).cos())
            .collect();
        let signal = ScalarSeries::new(0.0, dt, samples).unwrap();
        cwt_fft(&signal, &ScaleGrid::default()).unwrap()
    }

    #[test]
    fn csv_argmax_tracks_the_tone() {
        let spectrum = tone_spectrum();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scalogram.csv");
        write_scalogram_csv(&spectrum, &path).unwrap();

        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        let n_beta = header.split(',').count() - 1;
        assert_eq!(n_beta, spectrum.betas().len());

        let rows: Vec<Vec<f64>> = lines
            .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), spectrum.grid().len());
        // frequency column strictly descending
        assert!(rows.windows(2).all(|p| p[0][0] > p[1][0]));

        let frequencies = spectrum.frequencies();
        let nearest = frequencies
            .iter()
            .copied()
            .min_by(|a, b| {
                (a - 30.0).abs().partial_cmp(&(b - 30.0).abs()).unwrap()
            })
            .unwrap();
        // check the argmax over frequency at a mid-signal β column
        let col = 1 + n_beta / 2;
        let best = rows
            .iter()
            .max_by(|a, b| a[col].partial_cmp(&b[col]).unwrap())
            .unwrap();
        assert_eq!(best[0], nearest);
    }

    #[test]
    fn svg_is_produced_and_well_formed() {
        let spectrum = tone_spectrum();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scalogram.svg");
        write_scalogram_svg(&spectrum, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.trim_end().ends_with("</svg>"));
        assert!(text.contains("frequency [Hz]"));
        assert!(text.matches("<rect").count() > 100);
    }
}
