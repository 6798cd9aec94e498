#ifndef SCFB_H
#define SCFB_H

/* Generated by cbindgen from the scfb-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum ScfbStatus {
  // The call succeeded and all output buffers are valid.
  SCFB_STATUS_OK = 0,
  // A required pointer argument was null.
  SCFB_STATUS_NULL_POINTER = 1,
  // An argument is outside its documented domain.
  SCFB_STATUS_INVALID_PARAMETER = 2,
  // The argument combination is inconsistent for the requested operation.
  SCFB_STATUS_INVALID_CONFIGURATION = 3,
  // A caller contract was violated.
  SCFB_STATUS_CONTRACT_VIOLATION = 4,
  // An I/O operation failed.
  SCFB_STATUS_IO = 5,
  // An internal panic was caught at the boundary.
  SCFB_STATUS_PANIC = 6,
} ScfbStatus;

// Compared feedback schemes.
typedef enum ScfbScheme {
  // Superimposed feedback reconstructed with support-aided BIHT.
  SCFB_SCHEME_PROP_SCA = 0,
  // Superimposed feedback reconstructed with plain BIHT.
  SCFB_SCHEME_PROP_BIHT = 1,
  // Time-division baseline on dedicated symbols.
  SCFB_SCHEME_TDM = 2,
} ScfbScheme;

// Opaque handle to a Gaussian measurement matrix.
typedef struct ScfbMatrix ScfbMatrix;

// Diagnostics of one reconstruction run.
typedef struct ScfbReconstructionInfo {
  // Iterations executed before the solver returned.
  uint64_t iterations_used;
  // Real multiplications spent in projections and sign checks.
  uint64_t multiplies;
  // True if the final iterate reproduces every sign measurement.
  bool sign_consistent;
} ScfbReconstructionInfo;

// Aggregated result of one end-to-end Monte-Carlo trial.
typedef struct ScfbTrialOutcome {
  // Wrong uplink data bits.
  uint64_t bit_errors;
  // Uplink data bits sent.
  uint64_t bits_total;
  // Wrong feedback payload bits after frame detection.
  uint64_t frame_bit_errors;
  // Reconstruction error against the unit-normalized true channel.
  double nmse;
  // Iterations used by the reconstruction.
  uint64_t iterations_used;
  // True if every reconstructed nonzero lies in the fed-back support
  // (always true for schemes that feed no support back).
  bool support_respected;
} ScfbTrialOutcome;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static, null-terminated name of a status code, for diagnostics.
const char *scfb_status_name(enum ScfbStatus status);

// Creates an `n`×`m` measurement matrix with i.i.d. standard Gaussian
// entries drawn from the given seed, and stores the handle in `*out`.
//
// # Safety
//
// `out` must be a valid pointer to writable storage for one pointer. On
// success it receives a handle that must later be released with
// [`scfb_matrix_free`].
enum ScfbStatus scfb_matrix_new(uintptr_t n, uintptr_t m, uint64_t seed, struct ScfbMatrix **out);

// Releases a matrix handle. A null handle is a no-op.
//
// # Safety
//
// `matrix` must be null or a handle obtained from [`scfb_matrix_new`] that
// has not been freed before; the handle is invalid afterwards.
void scfb_matrix_free(struct ScfbMatrix *matrix);

// Signal dimension N of the matrix, or 0 for a null handle.
//
// # Safety
//
// `matrix` must be null or a live handle from [`scfb_matrix_new`].
uintptr_t scfb_matrix_n(const struct ScfbMatrix *matrix);

// Measurement count M of the matrix, or 0 for a null handle.
//
// # Safety
//
// `matrix` must be null or a live handle from [`scfb_matrix_new`].
uintptr_t scfb_matrix_m(const struct ScfbMatrix *matrix);

// 1-bit compression: writes the signs of `Re(Φᵀh)` and `Im(Φᵀh)` into
// `y_re` and `y_im`.
//
// `n` and `m` must equal the matrix dimensions; strictly positive values map
// to +1 and everything else to −1.
//
// # Safety
//
// `matrix` must be a live handle; `h_re`/`h_im` must point to `n` readable
// doubles each; `y_re`/`y_im` must point to `m` writable `int8_t` each.
enum ScfbStatus scfb_compress(const struct ScfbMatrix *matrix,
                              const double *h_re,
                              const double *h_im,
                              uintptr_t n,
                              int8_t *y_re,
                              int8_t *y_im,
                              uintptr_t m);

// Plain BIHT reconstruction from ±1 sign measurements.
//
// Writes the unit-norm (or all-zero) estimate into `h_re`/`h_im` and, if
// `info` is non-null, the run diagnostics into `*info`. `m` and `n` must
// equal the matrix dimensions.
//
// # Safety
//
// `matrix` must be a live handle; `y_re`/`y_im` must point to `m` readable
// `int8_t` each; `h_re`/`h_im` must point to `n` writable doubles each;
// `info` must be null or point to writable storage for one
// [`ScfbReconstructionInfo`].
enum ScfbStatus scfb_biht(const struct ScfbMatrix *matrix,
                          const int8_t *y_re,
                          const int8_t *y_im,
                          uintptr_t m,
                          uintptr_t xi,
                          uintptr_t itermax,
                          bool early_stop,
                          double *h_re,
                          double *h_im,
                          uintptr_t n,
                          struct ScfbReconstructionInfo *info);

// Support-aided BIHT reconstruction from ±1 sign measurements and a 0/1
// support mask of length `n`.
//
// # Safety
//
// As for [`scfb_biht`], plus: `support` must point to `n` readable
// `uint8_t`.
enum ScfbStatus scfb_sca_biht(const struct ScfbMatrix *matrix,
                              const int8_t *y_re,
                              const int8_t *y_im,
                              uintptr_t m,
                              const uint8_t *support,
                              uintptr_t xi,
                              uintptr_t itermax,
                              bool early_stop,
                              double *h_re,
                              double *h_im,
                              uintptr_t n,
                              struct ScfbReconstructionInfo *info);

// Runs one end-to-end Monte-Carlo trial with the sweep engine's seed
// derivation: all randomness is a function of (`master_seed`, scheme,
// `point`, `trial`), so results match a sweep row produced with the same
// coordinates.
//
// # Safety
//
// `out` must be a valid pointer to writable storage for one
// [`ScfbTrialOutcome`].
enum ScfbStatus scfb_run_trial(enum ScfbScheme scheme,
                               double snr_db,
                               double rho,
                               double c,
                               uintptr_t n,
                               uintptr_t p,
                               uintptr_t xi,
                               uintptr_t itermax,
                               uint64_t master_seed,
                               uintptr_t point,
                               uintptr_t trial,
                               struct ScfbTrialOutcome *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCFB_H */
