//! Reconstruction of rigid-body rotational head kinematics from an array of
//! headband-mounted IMUs.
//!
//! A headband instrumented with several gyroscope/accelerometer packages does
//! not move as a rigid body: every sensor picks up local deformation
//! vibrations on top of the shared head motion. This crate implements the
//! full desk-side processing chain for such recordings:
//!
//! - **Sensor-array fusion** ([`fusion`]): rotate per-sensor angular
//!   velocities into the head frame, detect the impact trigger from the 3 g
//!   linear-acceleration crossing, and average the array into the headband
//!   angular velocity.
//! - **Continuous wavelet transform** ([`wavelet`]): Gabor-wavelet CWT on an
//!   octave/voice scale grid, with the scale-to-frequency mapping used to
//!   draw scalograms.
//! - **Adaptive filtering** ([`filtering`]): per-impact cutoff selection from
//!   normalized scalogram slices at the beginning and end of head motion,
//!   4th-order Butterworth low-pass (causal or zero-phase), and five-point
//!   stencil differentiation to angular acceleration.
//! - **Agreement statistics** ([`metrics`]): Pearson r, concordance
//!   correlation, NRMSE, Bland-Altman limits of agreement and a simplified
//!   corridor/correlation curve rating.
//! - **Synthetic impacts** ([`synth`]): seeded ground-truth generator with
//!   closed-form peak values, used as the validation oracle for the whole
//!   pipeline, plus the Hertz-Mindlin contact-duration estimate.
//! - **I/O** ([`io`]): recording CSV schema, TOML configuration, JSON
//!   comparison reports and scalogram CSV/SVG export. The `headkin` binary
//!   exposes `reconstruct`, `evaluate`, `synth` and `scalogram` subcommands.
//!
//! All container types are immutable values and all operations are pure
//! functions, so distinct impacts can be processed concurrently without
//! coordination.

// validation guards are written `!(x > 0.0)` on purpose: the negation also
// rejects NaN, which `x <= 0.0` would let through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod filtering;
pub mod fusion;
pub mod io;
pub mod metrics;
pub mod series;
pub mod synth;
pub mod wavelet;

pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use filtering::{reconstruct, FilterDecision, HeadKinematics};
pub use fusion::{ImpactRecord, SensorMount};
pub use series::{ImpactWindow, ScalarSeries, Vec3Series};
