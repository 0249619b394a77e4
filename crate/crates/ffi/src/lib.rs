//! C ABI over the reconstruction pipeline.
//!
//! Conventions:
//! - Every fallible call returns an [`HkStatus`]; `HK_STATUS_OK` is 0.
//! - On failure a human-readable message is stored per thread and can be
//!   fetched with [`hk_last_error_message`].
//! - Configurations are opaque handles created by `hk_config_default` /
//!   `hk_config_load` and released with `hk_config_free`. Handles are not
//!   thread-safe; share nothing or guard externally.
//! - All paths and strings are NUL-terminated UTF-8.

use headband_kinematics::filtering::CutoffBranch;
use headband_kinematics::io::RunConfig;
use headband_kinematics::synth::hertz_contact_duration;
use headband_kinematics::{reconstruct, Error};
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HkStatus {
    /// Success.
    Ok = 0,
    /// A pointer argument was null or a value was out of range.
    InvalidArgument = 1,
    /// A file failed to parse or violated its schema.
    ParseError = 2,
    /// No sample crossed the impact trigger threshold.
    NoImpact = 3,
    /// The recording carries no usable signal energy.
    DegenerateSignal = 4,
    /// Underlying I/O failure.
    IoError = 5,
    /// Any other pipeline error.
    InternalError = 6,
}

/// Cutoff-rule branch taken for a reconstruction, mirroring the library enum.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HkBranch {
    NoiseSeparated = 0,
    Overlapping = 1,
    Capped = 2,
}

/// Scalar outcome of one reconstructed impact.
///
/// `pla` is NaN when the recording has no acceleration channels; `f_n` is
/// NaN when no transient-noise onset was found.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HkSummary {
    /// Peak rotational velocity, rad/s.
    pub prv: f64,
    /// Peak rotational acceleration, rad/s².
    pub pra: f64,
    /// Peak linear acceleration, m/s² (NaN if unavailable).
    pub pla: f64,
    /// Signal-end frequency, Hz.
    pub f_ss: f64,
    /// Noise-onset frequency, Hz (NaN if absent).
    pub f_n: f64,
    /// Selected low-pass cutoff, Hz.
    pub f_0: f64,
    /// Which branch of the cutoff rule fired.
    pub branch: HkBranch,
}

/// Opaque run configuration (pipeline settings plus sensor mounts).
pub struct HkConfig {
    inner: RunConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(message: impl Into<String>) {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message.into());
}

fn status_of(error: &Error) -> HkStatus {
    match error {
        Error::Parse { .. } | Error::Schema(_) | Error::Config(_) => HkStatus::ParseError,
        Error::NoImpactFound { .. } => HkStatus::NoImpact,
        Error::DegenerateSignal(_) => HkStatus::DegenerateSignal,
        Error::Io { .. } => HkStatus::IoError,
        Error::InvalidInput(_) | Error::OutOfRange(_) | Error::InvalidMount { .. } => {
            HkStatus::InvalidArgument
        }
        _ => HkStatus::InternalError,
    }
}

fn fail(error: &Error) -> HkStatus {
    set_error(error.to_string());
    status_of(error)
}

fn guard(f: impl FnOnce() -> HkStatus) -> HkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            HkStatus::InternalError
        }
    }
}

unsafe fn path_arg(path: *const c_char) -> Result<&'static str, HkStatus> {
    if path.is_null() {
        set_error("path is null");
        return Err(HkStatus::InvalidArgument);
    }
    CStr::from_ptr(path).to_str().map_err(|_| {
        set_error("path is not valid UTF-8");
        HkStatus::InvalidArgument
    })
}

/// Copy the message of the most recent failure on this thread into `buffer`
/// (always NUL-terminated, truncated to `length` bytes). Returns the full
/// message length in bytes, excluding the terminator.
///
/// # Safety
/// `buffer` must point to `length` writable bytes, or be null (query mode).
#[no_mangle]
pub unsafe extern "C" fn hk_last_error_message(buffer: *mut c_char, length: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        let bytes = message.as_bytes();
        if !buffer.is_null() && length > 0 {
            let n = bytes.len().min(length - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buffer.cast(), n);
            *buffer.add(n) = 0;
        }
        bytes.len()
    })
}

/// Create a configuration with all default pipeline settings and no sensor
/// mounts. Never fails. Release with `hk_config_free`.
#[no_mangle]
pub extern "C" fn hk_config_default() -> *mut HkConfig {
    Box::into_raw(Box::new(HkConfig { inner: RunConfig::default() }))
}

/// Load a TOML run configuration (pipeline settings plus `[[sensor]]`
/// mounts). On success `*out` owns the new handle.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hk_config_load(path: *const c_char, out: *mut *mut HkConfig) -> HkStatus {
    guard(|| {
        if out.is_null() {
            set_error("out is null");
            return HkStatus::InvalidArgument;
        }
        let path = match path_arg(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match RunConfig::load(path) {
            Ok(config) => {
                *out = Box::into_raw(Box::new(HkConfig { inner: config }));
                HkStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Release a configuration handle. Null is a no-op.
///
/// # Safety
/// `config` must have come from `hk_config_default`/`hk_config_load` and
/// must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hk_config_free(config: *mut HkConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Hertz-Mindlin elastic contact duration in seconds:
/// `t = 2.94 · (5m / (4·E*·√R))^(2/5) · v^(−1/5)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hk_hertz_contact_duration(
    mass_kg: f64,
    effective_modulus_pa: f64,
    radius_m: f64,
    speed_mps: f64,
    out: *mut f64,
) -> HkStatus {
    guard(|| {
        if out.is_null() {
            set_error("out is null");
            return HkStatus::InvalidArgument;
        }
        match hertz_contact_duration(mass_kg, effective_modulus_pa, radius_m, speed_mps) {
            Ok(t) => {
                *out = t;
                HkStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Run the full reconstruction pipeline on a recording CSV using the mounts
/// and pipeline settings of `config`, writing the scalar summary to `*out`.
///
/// # Safety
/// `config` must be a live handle, `path` a NUL-terminated string, `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hk_reconstruct_file(
    config: *const HkConfig,
    path: *const c_char,
    out: *mut HkSummary,
) -> HkStatus {
    guard(|| {
        if config.is_null() || out.is_null() {
            set_error("config or out is null");
            return HkStatus::InvalidArgument;
        }
        let config = &(*config).inner;
        let path = match path_arg(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let run = || -> Result<HkSummary, Error> {
            let mounts = config.mounts()?;
            let record = headband_kinematics::io::read_recording(path, &mounts)?;
            let kinematics = reconstruct(&record, &config.pipeline)?;
            let d = &kinematics.decision;
            Ok(HkSummary {
                prv: kinematics.prv,
                pra: kinematics.pra,
                pla: kinematics.pla.unwrap_or(f64::NAN),
                f_ss: d.f_ss,
                f_n: d.f_n.unwrap_or(f64::NAN),
                f_0: d.f_0,
                branch: match d.branch {
                    CutoffBranch::NoiseSeparated => HkBranch::NoiseSeparated,
                    CutoffBranch::Overlapping => HkBranch::Overlapping,
                    CutoffBranch::Capped => HkBranch::Capped,
                },
            })
        };
        match run() {
            Ok(summary) => {
                *out = summary;
                HkStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}
