#ifndef DENSECAP_H
#define DENSECAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdint.h>
#include <stddef.h>

// Status code returned by every fallible function.
typedef enum DcStatus {
  DC_STATUS_OK = 0,
  DC_STATUS_NULL_POINTER = 1,
  DC_STATUS_INVALID_ARGUMENT = 2,
  DC_STATUS_DIMENSION_MISMATCH = 3,
  DC_STATUS_NOT_HERMITIAN = 4,
  DC_STATUS_NOT_POSITIVE = 5,
  DC_STATUS_NOT_NORMALIZED = 6,
  DC_STATUS_UNSUPPORTED_RANK = 7,
  DC_STATUS_SCENARIO_MISMATCH = 8,
  DC_STATUS_OPTIMIZER_FAILED = 9,
  DC_STATUS_PANIC = 98,
  DC_STATUS_INTERNAL = 99,
} DcStatus;

// Party layout of a dense-coding protocol (senders first, then receivers).
typedef enum DcScenario {
  DC_SCENARIO_ONE_SENDER_ONE_RECEIVER = 0,
  DC_SCENARIO_TWO_SENDERS_ONE_RECEIVER = 1,
  DC_SCENARIO_TWO_SENDERS_TWO_RECEIVERS = 2,
} DcScenario;

// Which parties apply a local two-outcome POVM.
typedef enum DcActing {
  DC_ACTING_NONE = 0,
  DC_ACTING_SENDER = 1,
  DC_ACTING_RECEIVER = 2,
  DC_ACTING_BOTH = 3,
} DcActing;

// Quantity optimized by [`dc_merits`].
typedef enum DcObjective {
  // Dense-coding capacity (bits).
  DC_OBJECTIVE_CAPACITY = 0,
  // Teleportation fidelity (two qubits only).
  DC_OBJECTIVE_FIDELITY = 1,
} DcObjective;

// Opaque density-matrix handle.
typedef struct DcState DcState;

// Figures of merit of local pre-processing for one state.
typedef struct DcMerits {
  // Merit without pre-processing.
  double before;
  // Best merit over single outcomes.
  double best_outcome;
  // Probability of that outcome.
  double best_outcome_probability;
  // Outcome-averaged merit at the best-outcome parameters.
  double average_at_best;
  // Outcome-averaged merit maximized over all parameters.
  double best_average;
} DcMerits;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copy the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len − 1` bytes). Returns the full message length in bytes
// excluding the terminator, or 0 when no error has been recorded.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
uintptr_t dc_last_error_message(char *buf, uintptr_t len);

// Library version as a static NUL-terminated string.
const char *dc_version(void);

// Seed of sample `index` in a run keyed by `master_seed`.
uint64_t dc_derive_sample_seed(uint64_t master_seed, uint64_t index);

// Build a state from row-major real and imaginary parts of a `dim × dim`
// density matrix with subsystem dimensions `dims[0..n_dims]`. The matrix must
// be Hermitian, unit-trace and positive semidefinite within 1e-10.
//
// # Safety
// `re` and `im` must point to `dim·dim` doubles, `dims` to `n_dims` values,
// and `out` must be writable.
enum DcStatus dc_state_from_parts(const double *re,
                                  const double *im,
                                  uintptr_t dim,
                                  const uintptr_t *dims,
                                  uintptr_t n_dims,
                                  struct DcState **out);

// Random state of exactly `rank` on subsystems `dims`, obtained by tracing
// out a `rank`-dimensional ancilla of a Haar-random pure state.
//
// # Safety
// `dims` must point to `n_dims` values and `out` must be writable.
enum DcStatus dc_state_haar(const uintptr_t *dims,
                            uintptr_t n_dims,
                            uintptr_t rank,
                            uint64_t seed,
                            struct DcState **out);

// Release a state. Null is ignored.
//
// # Safety
// `state` must be null or a live handle; it must not be used afterwards.
void dc_state_free(struct DcState *state);

// Total Hilbert-space dimension of the state.
//
// # Safety
// `state` must be a live handle and `out` writable.
enum DcStatus dc_state_dim(const struct DcState *state, uintptr_t *out);

// Copy the matrix entries into row-major `re` / `im` buffers of `len` doubles
// each (`len` must be at least `dim·dim`).
//
// # Safety
// `state` must be a live handle and `re`, `im` must point to `len` writable doubles.
enum DcStatus dc_state_entries(const struct DcState *state, double *re, double *im, uintptr_t len);

// Von Neumann entropy in bits.
//
// # Safety
// `state` must be a live handle and `out` writable.
enum DcStatus dc_entropy(const struct DcState *state, double *out);

// Dense-coding capacity in bits. For two senders and two receivers this is
// the upper bound with `S1↔R1`, `S2↔R2` pairing.
//
// # Safety
// `state` must be a live handle and `out` writable.
enum DcStatus dc_dense_coding_capacity(const struct DcState *state,
                                       enum DcScenario scenario,
                                       double *out);

// Teleportation fidelity of a two-qubit state.
//
// # Safety
// `state` must be a live handle and `out` writable.
enum DcStatus dc_teleportation_fidelity(const struct DcState *state, double *out);

// CHSH parameter `M` (sum of the two largest eigenvalues of `CᵀC`) of a
// two-qubit state; `M > 1` signals a Bell violation.
//
// # Safety
// `state` must be a live handle and `out` writable.
enum DcStatus dc_chsh_parameter(const struct DcState *state, double *out);

// Negativity across the cut `side : rest`.
//
// # Safety
// `state` must be a live handle, `side` must point to `n_side` indices and
// `out` must be writable.
enum DcStatus dc_negativity(const struct DcState *state,
                            const uintptr_t *side,
                            uintptr_t n_side,
                            double *out);

// Optimize local two-outcome POVMs on the acting parties and report all
// figures of merit. `starts`, `iters` and `tol` configure the multi-start
// simplex search; `seed` makes it reproducible.
//
// # Safety
// `state` must be a live handle and `out` writable.
enum DcStatus dc_merits(const struct DcState *state,
                        enum DcScenario scenario,
                        enum DcActing acting,
                        enum DcObjective objective,
                        uintptr_t starts,
                        uintptr_t iters,
                        double tol,
                        uint64_t seed,
                        struct DcMerits *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DENSECAP_H */
