#ifndef NSFRAMES_H
#define NSFRAMES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. Values from 10 on mirror the library error kinds.
typedef enum NsfStatus {
  NSF_STATUS_OK = 0,
  NSF_STATUS_NULL_POINTER = 1,
  NSF_STATUS_INVALID_UTF8 = 2,
  NSF_STATUS_PANIC = 3,
  NSF_STATUS_UNKNOWN_COMMAND = 4,
  NSF_STATUS_INVALID_DILATION = 10,
  NSF_STATUS_INVALID_SEGMENT = 11,
  NSF_STATUS_UNBOUNDED_FAMILY = 12,
  NSF_STATUS_HYPOTHESIS_VIOLATION = 13,
  NSF_STATUS_NOT_A_FRAME = 14,
  NSF_STATUS_INVALID_PARAMS = 15,
  NSF_STATUS_ILL_POSED_OPERATOR = 16,
  NSF_STATUS_COVERAGE = 17,
  NSF_STATUS_GRID_INCOMPATIBLE = 18,
  NSF_STATUS_QUADRATURE_FAILURE = 19,
  NSF_STATUS_NON_MONOTONE_SWEEP = 20,
  NSF_STATUS_LINALG = 21,
  NSF_STATUS_CONFIG = 22,
  NSF_STATUS_IO = 23,
} NsfStatus;

// Opaque piecewise-linear spectrum.
typedef struct NsfSpectrum NsfSpectrum;

// Opaque system built from a config.
typedef struct NsfSystem NsfSystem;

// Linear piece `intercept + slope·γ` on `(lo, hi]`.
typedef struct NsfSegment {
  double lo;
  double hi;
  double intercept_re;
  double intercept_im;
  double slope_re;
  double slope_im;
} NsfSegment;

typedef struct NsfBounds {
  double lower;
  double upper;
  bool is_tight;
  bool is_parseval;
} NsfBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next call into this library on the same thread.
const char *nsf_last_error_message(void);

// Library version as a static string.
const char *nsf_version(void);

// # Safety
// `segments` must point to `count` readable segments; `out` must be writable.
enum NsfStatus nsf_spectrum_new(const struct NsfSegment *segments,
                                size_t count,
                                double time_shift,
                                struct NsfSpectrum **out);

// # Safety
// `spec` must come from [`nsf_spectrum_new`] and not be used afterwards.
void nsf_spectrum_free(struct NsfSpectrum *spec);

// Value at `gamma`, including the time-shift phase.
//
// # Safety
// `spec` must be a live handle; `re` and `im` must be writable.
enum NsfStatus nsf_spectrum_eval(const struct NsfSpectrum *spec,
                                 double gamma,
                                 double *re,
                                 double *im);

// `∫ f·conj(g)·e^{2πiδγ} dγ` in closed form.
//
// # Safety
// `f` and `g` must be live handles; `re` and `im` must be writable.
enum NsfStatus nsf_spectrum_inner_product(const struct NsfSpectrum *f,
                                          const struct NsfSpectrum *g,
                                          double delta,
                                          double *re,
                                          double *im);

// Builds the system declared in a TOML config.
//
// # Safety
// `toml` must be a nul-terminated string; `out` must be writable.
enum NsfStatus nsf_system_from_config_toml(const char *toml, struct NsfSystem **out);

// # Safety
// `sys` must come from [`nsf_system_from_config_toml`] and not be used afterwards.
void nsf_system_free(struct NsfSystem *sys);

// Analytic frame bounds of a translate family or Gabor system.
//
// # Safety
// `sys` must be a live handle; `out` must be writable.
enum NsfStatus nsf_system_frame_bounds(const struct NsfSystem *sys, struct NsfBounds *out);

// Extreme eigenvalues of the discretized frame operator on `n` cells of `(lo, hi]`.
//
// # Safety
// `sys` must be a live handle; `min_eig` and `max_eig` must be writable.
enum NsfStatus nsf_system_oracle_bounds(const struct NsfSystem *sys,
                                        double lo,
                                        double hi,
                                        size_t n,
                                        double *min_eig,
                                        double *max_eig);

// Runs a CLI command (`analyze`, `gabor`, `wavelet`, `dual`,
// `finite-section`, `independence`) on a TOML config and returns the
// report JSON, to be released with [`nsf_string_free`].
//
// # Safety
// `toml` and `command` must be nul-terminated strings; `out_json` must be writable.
enum NsfStatus nsf_run_config(const char *toml, const char *command, char **out_json);

// # Safety
// `s` must come from this library and not be used afterwards.
void nsf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NSFRAMES_H */
