#ifndef HEADBAND_KINEMATICS_H
#define HEADBAND_KINEMATICS_H

/* Generated by cbindgen from the Rust sources; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Cutoff-rule branch taken for a reconstruction, mirroring the library enum.
 */
typedef enum HkBranch {
  HkBranch_NoiseSeparated = 0,
  HkBranch_Overlapping = 1,
  HkBranch_Capped = 2,
} HkBranch;

/**
 * Result of every fallible call.
 */
typedef enum HkStatus {
  /**
   * Success.
   */
  HkStatus_Ok = 0,
  /**
   * A pointer argument was null or a value was out of range.
   */
  HkStatus_InvalidArgument = 1,
  /**
   * A file failed to parse or violated its schema.
   */
  HkStatus_ParseError = 2,
  /**
   * No sample crossed the impact trigger threshold.
   */
  HkStatus_NoImpact = 3,
  /**
   * The recording carries no usable signal energy.
   */
  HkStatus_DegenerateSignal = 4,
  /**
   * Underlying I/O failure.
   */
  HkStatus_IoError = 5,
  /**
   * Any other pipeline error.
   */
  HkStatus_InternalError = 6,
} HkStatus;

/**
 * Opaque run configuration (pipeline settings plus sensor mounts).
 */
typedef struct HkConfig HkConfig;

/**
 * Scalar outcome of one reconstructed impact.
 *
 * `pla` is NaN when the recording has no acceleration channels; `f_n` is
 * NaN when no transient-noise onset was found.
 */
typedef struct HkSummary {
  /**
   * Peak rotational velocity, rad/s.
   */
  double prv;
  /**
   * Peak rotational acceleration, rad/s².
   */
  double pra;
  /**
   * Peak linear acceleration, m/s² (NaN if unavailable).
   */
  double pla;
  /**
   * Signal-end frequency, Hz.
   */
  double f_ss;
  /**
   * Noise-onset frequency, Hz (NaN if absent).
   */
  double f_n;
  /**
   * Selected low-pass cutoff, Hz.
   */
  double f_0;
  /**
   * Which branch of the cutoff rule fired.
   */
  enum HkBranch branch;
} HkSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the message of the most recent failure on this thread into `buffer`
 * (always NUL-terminated, truncated to `length` bytes). Returns the full
 * message length in bytes, excluding the terminator.
 *
 * # Safety
 * `buffer` must point to `length` writable bytes, or be null (query mode).
 */
uintptr_t hk_last_error_message(char *buffer, uintptr_t length);

/**
 * Create a configuration with all default pipeline settings and no sensor
 * mounts. Never fails. Release with `hk_config_free`.
 */
struct HkConfig *hk_config_default(void);

/**
 * Load a TOML run configuration (pipeline settings plus `[[sensor]]`
 * mounts). On success `*out` owns the new handle.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HkStatus hk_config_load(const char *path, struct HkConfig **out);

/**
 * Release a configuration handle. Null is a no-op.
 *
 * # Safety
 * `config` must have come from `hk_config_default`/`hk_config_load` and
 * must not be used afterwards.
 */
void hk_config_free(struct HkConfig *config);

/**
 * Hertz-Mindlin elastic contact duration in seconds:
 * `t = 2.94 · (5m / (4·E*·√R))^(2/5) · v^(−1/5)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HkStatus hk_hertz_contact_duration(double mass_kg,
                                        double effective_modulus_pa,
                                        double radius_m,
                                        double speed_mps,
                                        double *out);

/**
 * Run the full reconstruction pipeline on a recording CSV using the mounts
 * and pipeline settings of `config`, writing the scalar summary to `*out`.
 *
 * # Safety
 * `config` must be a live handle, `path` a NUL-terminated string, `out` a
 * valid pointer.
 */
enum HkStatus hk_reconstruct_file(const struct HkConfig *config,
                                  const char *path,
                                  struct HkSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HEADBAND_KINEMATICS_H */
