#ifndef QDISCORD_H
#define QDISCORD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QdStatus {
  QD_STATUS_OK = 0,
  QD_STATUS_NULL_POINTER = 1,
  QD_STATUS_INVALID_ARGUMENT = 2,
  QD_STATUS_NOT_A_STATE = 3,
  QD_STATUS_UNSUPPORTED_STATE_CLASS = 4,
  QD_STATUS_INTERNAL_INCONSISTENCY = 5,
  QD_STATUS_PARSE = 6,
  QD_STATUS_IO = 7,
  QD_STATUS_PANIC = 8,
} QdStatus;

// Opaque one- or two-qubit density operator.
typedef struct QdState QdState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer stays
// valid until the next failing call on the same thread.
const char *qd_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *qd_version(void);

// Prepares a named scenario state (`rho1`, `rho2`, `plus_plus`, `werner`,
// `werner_input`, `bell_phi_plus`). `p` is used only by the Werner states.
//
// # Safety
// `id` must be a valid NUL-terminated string and `out` a writable pointer.
enum QdStatus qd_state_prepare(const char *id, double p, struct QdState **out);

// Builds a state from `dim * dim` row-major real and imaginary parts.
// `dim` must be 2 or 4.
//
// # Safety
// `re` and `im` must each point to `dim * dim` readable doubles; `out` must be writable.
enum QdStatus qd_state_from_matrix(uintptr_t dim,
                                   const double *re,
                                   const double *im,
                                   struct QdState **out);

// Releases a handle. NULL is ignored.
//
// # Safety
// `state` must be NULL or a handle from this library that has not been freed.
void qd_state_free(struct QdState *state);

// Hilbert-space dimension of the handle (2 or 4), or 0 for NULL.
//
// # Safety
// `state` must be NULL or a live handle.
uintptr_t qd_state_dim(const struct QdState *state);

// Copies the matrix into `dim * dim` row-major real and imaginary buffers.
//
// # Safety
// `state` must be a live handle; `re` and `im` must each hold `dim * dim` doubles.
enum QdStatus qd_state_matrix(const struct QdState *state, double *re, double *im);

// Amplitude damping with decay probability `p`. For two-qubit states it acts
// on `side` (0 = A, 1 = B); for single qubits `side` is ignored.
//
// # Safety
// `state` must be a live handle and `out` writable.
enum QdStatus qd_apply_amplitude_damping(const struct QdState *state,
                                         double p,
                                         uint32_t side,
                                         struct QdState **out);

// Complete correlated dephasing about the unit axis `(nx, ny, nz)`.
//
// # Safety
// `state` must be a live two-qubit handle and `out` writable.
enum QdStatus qd_apply_correlated_dephasing(const struct QdState *state,
                                            double nx,
                                            double ny,
                                            double nz,
                                            struct QdState **out);

// Discord in bits with projective measurements on `side` (0 = A, 1 = B).
//
// # Safety
// `state` must be a live two-qubit handle and `out` writable.
enum QdStatus qd_discord(const struct QdState *state, uint32_t side, double *out);

// Mutual information in bits.
//
// # Safety
// `state` must be a live two-qubit handle and `out` writable.
enum QdStatus qd_mutual_information(const struct QdState *state, double *out);

// # Safety
// `state` must be a live two-qubit handle and `out` writable.
enum QdStatus qd_concurrence(const struct QdState *state, double *out);

// # Safety
// `state` must be a live two-qubit handle and `out` writable.
enum QdStatus qd_tangle(const struct QdState *state, double *out);

// Writes the four correlation-matrix singular values, descending.
//
// # Safety
// `state` must be a live two-qubit handle and `out` must hold 4 doubles.
enum QdStatus qd_singular_values(const struct QdState *state, double *out);

// Correlation rank at relative `tolerance` in (0, 0.5).
//
// # Safety
// `state` must be a live two-qubit handle and `out` writable.
enum QdStatus qd_correlation_rank(const struct QdState *state, double tolerance, uint32_t *out);

// Squared Uhlmann fidelity; both handles must have the same dimension.
//
// # Safety
// `a` and `b` must be live handles and `out` writable.
enum QdStatus qd_fidelity(const struct QdState *a, const struct QdState *b, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QDISCORD_H */
