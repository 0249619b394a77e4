//! Command-line front end for the reconstruction pipeline.
//!
//! Subcommands: `reconstruct` (recording CSVs → kinematics + JSON report),
//! `evaluate` (paired headband/reference series → agreement report),
//! `synth` (seeded scenario → recording CSV + ground truth), and
//! `scalogram` (one stream → CSV matrix + SVG heatmap).

use clap::{Parser, Subcommand};
use headband_kinematics::config::FilterMode;
use headband_kinematics::error::{Error, Result};
use headband_kinematics::fusion::ImpactLocation;
use headband_kinematics::io::{
    read_recording, read_scalar_csv, read_vec3_csv, write_recording, write_scalogram_csv,
    write_scalogram_svg, write_vec3_csv, ComparisonReport, ImpactComparison, ReconstructedImpact,
    ReconstructionReport, RunConfig,
};
use headband_kinematics::metrics::{cora_score, peak_metrics, CoraRating};
use headband_kinematics::series::ScalarSeries;
use headband_kinematics::synth::synthesize_impact;
use headband_kinematics::wavelet::{cwt_fft, ScaleGrid};
use headband_kinematics::{reconstruct, Vec3Series};
use rayon::prelude::*;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "headkin",
    version,
    about = "Rotational head kinematics from headband IMU arrays"
)]
struct Cli {
    /// TOML run configuration (pipeline settings, sensor mounts, scenario).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for batch processing (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct head kinematics from one or more recording CSVs.
    Reconstruct {
        /// Recording CSV files.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,

        /// JSON report destination.
        #[arg(long)]
        out: PathBuf,

        /// Directory for per-impact angular-velocity CSVs
        /// (default: next to the report).
        #[arg(long)]
        kinematics_dir: Option<PathBuf>,

        /// Override the configured filter mode.
        #[arg(long, value_name = "causal|zero-phase")]
        mode: Option<String>,
    },
    /// Compare reconstructed kinematics against reference curves.
    Evaluate {
        /// Manifest CSV: label,location,headband_csv,reference_csv
        /// (paths relative to the manifest).
        #[arg(long)]
        manifest: PathBuf,

        /// JSON report destination.
        #[arg(long)]
        out: PathBuf,

        /// Reconstruction report whose filter decisions are merged in by
        /// label.
        #[arg(long)]
        decisions: Option<PathBuf>,
    },
    /// Generate a seeded synthetic impact recording plus ground truth.
    Synth {
        /// Output directory (recording.csv, truth.csv, run.toml).
        #[arg(long)]
        out_dir: PathBuf,

        /// RNG seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Export the wavelet scalogram of a single stream.
    Scalogram {
        /// Input CSV: either `t,value` or `t,x,y,z` (resultant taken).
        input: PathBuf,

        /// Output base path; writes `<out>.csv` and `<out>.svg`.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: could not configure {jobs} worker threads: {e}");
            std::process::exit(1);
        }
    }
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig> {
    match path {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = load_config(&cli.config)?;
    match cli.command {
        Command::Reconstruct { inputs, out, kinematics_dir, mode } => {
            if let Some(mode) = mode {
                config.pipeline.filter_mode = match mode.as_str() {
                    "causal" => FilterMode::Causal,
                    "zero-phase" => FilterMode::ZeroPhase,
                    other => {
                        return Err(Error::Config(format!(
                            "unknown filter mode '{other}' (expected causal or zero-phase)"
                        )))
                    }
                };
            }
            cmd_reconstruct(&config, &inputs, &out, kinematics_dir.as_deref())
        }
        Command::Evaluate { manifest, out, decisions } => {
            cmd_evaluate(&config, &manifest, &out, decisions.as_deref())
        }
        Command::Synth { out_dir, seed } => cmd_synth(&config, &out_dir, seed),
        Command::Scalogram { input, out } => cmd_scalogram(&config, &input, &out),
    }
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn cmd_reconstruct(
    config: &RunConfig,
    inputs: &[PathBuf],
    out: &Path,
    kinematics_dir: Option<&Path>,
) -> Result<()> {
    let mounts = config.mounts()?;
    if mounts.is_empty() {
        return Err(Error::Config(
            "the run configuration declares no [[sensor]] mounts".into(),
        ));
    }
    let kin_dir = kinematics_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| out.parent().unwrap_or(Path::new(".")).to_path_buf());
    std::fs::create_dir_all(&kin_dir)
        .map_err(|e| Error::io(kin_dir.display().to_string(), e))?;

    let results: Vec<Result<ReconstructedImpact>> = inputs
        .par_iter()
        .map(|input| {
            let record = read_recording(input, &mounts)?;
            let kinematics = reconstruct(&record, &config.pipeline)?;
            let label = stem_of(input);
            let series_path = kin_dir.join(format!("{label}.kinematics.csv"));
            write_vec3_csv(&kinematics.angular_velocity, &series_path)?;
            Ok(ReconstructedImpact {
                label,
                source: input.display().to_string(),
                location: record.location,
                prv: kinematics.prv,
                pra: kinematics.pra,
                pla: kinematics.pla,
                decision: kinematics.decision,
            })
        })
        .collect();

    let mut impacts = Vec::with_capacity(results.len());
    for result in results {
        impacts.push(result?);
    }
    for impact in &impacts {
        let pla = impact
            .pla
            .map(|v| format!("{v:.1} m/s^2"))
            .unwrap_or_else(|| "n/a".into());
        println!(
            "{}: PRV {:.3} rad/s, PRA {:.1} rad/s^2, PLA {}, f0 {:.1} Hz ({})",
            impact.label,
            impact.prv,
            impact.pra,
            pla,
            impact.decision.f_0,
            impact.decision.branch
        );
    }
    ReconstructionReport::new(impacts).save(out)?;
    println!("report written to {}", out.display());
    Ok(())
}

/// Crop two series sharing a sample interval to their common time span,
/// returning grid-identical copies (candidate re-stamped onto the
/// reference's cropped grid).
fn align(reference: &ScalarSeries, candidate: &ScalarSeries) -> Result<(ScalarSeries, ScalarSeries)> {
    let dt = reference.dt();
    if ((candidate.dt() - dt) / dt).abs() > 1e-9 {
        return Err(Error::invalid_input(format!(
            "sample rates differ ({} vs {} Hz); resample before evaluating",
            1.0 / dt,
            1.0 / candidate.dt()
        )));
    }
    // integer sample offset of the candidate grid relative to the reference
    let shift = (candidate.start_time() - reference.start_time()) / dt;
    let offset = shift.round() as i64;
    if (shift - offset as f64).abs() > 0.25 {
        return Err(Error::invalid_input(
            "series grids are not phase-aligned; resample before evaluating",
        ));
    }
    let first_ref = offset.max(0) as usize;
    let first_cand = (-offset).max(0) as usize;
    let n = (reference.len() - first_ref.min(reference.len()))
        .min(candidate.len() - first_cand.min(candidate.len()));
    if n < 4 {
        return Err(Error::invalid_input("series do not overlap"));
    }
    let start = reference.time_at(first_ref);
    let r = ScalarSeries::new(
        start,
        dt,
        reference.samples()[first_ref..first_ref + n].to_vec(),
    )?;
    let c = ScalarSeries::new(
        start,
        dt,
        candidate.samples()[first_cand..first_cand + n].to_vec(),
    )?;
    Ok((r, c))
}

fn rate_curves(
    config: &RunConfig,
    reference: &Vec3Series,
    candidate: &Vec3Series,
) -> Result<CoraRating> {
    let (r, c) = align(&reference.resultant()?, &candidate.resultant()?)?;
    cora_score(&r, &c, &config.pipeline.cora)
}

fn cmd_evaluate(
    config: &RunConfig,
    manifest: &Path,
    out: &Path,
    decisions: Option<&Path>,
) -> Result<()> {
    let decisions = decisions.map(ReconstructionReport::load).transpose()?;
    let base = manifest.parent().unwrap_or(Path::new(".")).to_path_buf();
    let file = std::fs::File::open(manifest)
        .map_err(|e| Error::io(manifest.display().to_string(), e))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(std::io::BufReader::new(file));
    {
        let headers = reader.headers().map_err(|e| Error::Schema(e.to_string()))?;
        let expected = ["label", "location", "headband_csv", "reference_csv"];
        if headers.iter().ne(expected) {
            return Err(Error::Schema(format!(
                "manifest header must be 'label,location,headband_csv,reference_csv', got '{}'",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
    }

    let mut impacts = Vec::new();
    for row in reader.records() {
        let record = row.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected 4 fields, got {}", record.len()),
            });
        }
        let label = record[0].to_string();
        let location: ImpactLocation = record[1].parse().map_err(|_| Error::Parse {
            line,
            message: format!("unknown impact location '{}'", &record[1]),
        })?;
        let headband = read_vec3_csv(base.join(&record[2]))?;
        let reference = read_vec3_csv(base.join(&record[3]))?;
        let (prv_headband, pra_headband) = peak_metrics(&headband)?;
        let (prv_reference, pra_reference) = peak_metrics(&reference)?;
        let cora = rate_curves(config, &reference, &headband).ok();
        let decision = decisions.as_ref().and_then(|report| {
            report
                .impacts
                .iter()
                .find(|i| i.label == label)
                .map(|i| i.decision)
        });
        impacts.push(ImpactComparison {
            label,
            location,
            prv_headband,
            prv_reference,
            pra_headband,
            pra_reference,
            decision,
            cora,
        });
    }

    let report = ComparisonReport::from_impacts(impacts);
    if let Some(overall) = &report.overall {
        let fmt = |v: Option<f64>| v.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into());
        println!(
            "n = {}; PRV: r {}, CCC {}, NRMSE {}; PRA: r {}, CCC {}, NRMSE {}",
            overall.n,
            fmt(overall.prv.r),
            fmt(overall.prv.ccc),
            fmt(overall.prv.nrmse),
            fmt(overall.pra.r),
            fmt(overall.pra.ccc),
            fmt(overall.pra.nrmse),
        );
    } else {
        println!("manifest contained no impacts");
    }
    report.save(out)?;
    println!("report written to {}", out.display());
    Ok(())
}

fn cmd_synth(config: &RunConfig, out_dir: &Path, seed: u64) -> Result<()> {
    let scenario = config.scenario.clone().unwrap_or_default();
    let (record, truth) = synthesize_impact(&scenario, seed)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir.display().to_string(), e))?;

    let recording_path = out_dir.join("recording.csv");
    write_recording(&record, &recording_path)?;
    let truth_path = out_dir.join("truth.csv");
    // zero the truth clock at the sample nearest the impact so the series
    // stays phase-aligned with reconstructed kinematics during evaluation
    let dt = 1.0 / scenario.sample_rate;
    let zero = (scenario.impact_time / dt).round() * dt;
    write_vec3_csv(&truth.angular_velocity.rebased(zero), &truth_path)?;

    // a ready-to-use run configuration with the generated mounts
    let run = RunConfig {
        pipeline: config.pipeline.clone(),
        sensors: record
            .sensors
            .iter()
            .map(|s| headband_kinematics::io::SensorConfigEntry::from_mount(&s.mount))
            .collect(),
        scenario: Some(scenario.clone()),
    };
    let run_path = out_dir.join("run.toml");
    run.save(&run_path)?;

    println!(
        "seed {seed}: {} sensors, ground truth PRV {:.3} rad/s, PRA {:.1} rad/s^2",
        record.sensors.len(),
        truth.prv,
        truth.pra
    );
    println!(
        "wrote {}, {}, {}",
        recording_path.display(),
        truth_path.display(),
        run_path.display()
    );
    Ok(())
}

fn cmd_scalogram(config: &RunConfig, input: &Path, out: &Path) -> Result<()> {
    let signal = read_scalar_csv(input)?;
    let grid = ScaleGrid::new(
        config.pipeline.alpha,
        config.pipeline.octaves,
        config.pipeline.voices,
    )?;
    let spectrum = cwt_fft(&signal, &grid)?;
    let csv_path = out.with_extension("csv");
    let svg_path = out.with_extension("svg");
    write_scalogram_csv(&spectrum, &csv_path)?;
    write_scalogram_svg(&spectrum, &svg_path)?;
    println!("wrote {} and {}", csv_path.display(), svg_path.display());
    Ok(())
}
