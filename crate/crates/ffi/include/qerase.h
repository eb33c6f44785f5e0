#ifndef QERASE_H
#define QERASE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call.
typedef enum {
  QE_STATUS_OK = 0,
  // Panic or other internal failure.
  QE_STATUS_INTERNAL = 1,
  // Malformed JSON or a matrix that is not a valid state/channel.
  QE_STATUS_PARSE = 2,
  QE_STATUS_UNSUPPORTED_DIMENSION = 3,
  QE_STATUS_INVALID_PARAMETER = 4,
  // A bound check failed; any report out-parameter is still filled.
  QE_STATUS_BOUND_VIOLATION = 5,
  QE_STATUS_NULL_POINTER = 6,
} QeStatus;

// Kraus channel.
typedef struct QeChannel QeChannel;

// Density operator over labelled subsystems.
typedef struct QeState QeState;

// Optimizer settings for discord; see [`qe_optimizer_default`].
typedef struct {
  size_t grid_resolution;
  size_t refinement_iterations;
  size_t random_restarts;
  uint64_t seed;
  // Bits.
  double convergence_tol;
} QeOptimizerConfig;

// Correlations of a bipartite state, in bits.
typedef struct {
  double mutual_information;
  double classical_correlation;
  double discord;
  // Signed `S(unmeasured | measured)`.
  double conditional_entropy;
  double optimizer_slack;
} QeCorrelations;

// Aggregate of a Monte Carlo sweep.
typedef struct {
  size_t trials;
  size_t failed_trials;
  size_t total_violations;
  size_t erasure_violations;
  size_t total_entropy_violations;
  size_t generalized_landauer_violations;
  size_t mutual_information_violations;
  size_t creation_violations;
  size_t creation_evaluated;
  size_t entangled_memory_trials;
  double erasure_min_margin;
  double optimizer_slack;
} QeMonteCarloSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread; empty if none. Valid until
// the next failing call on the same thread.
const char *qe_last_error_message(void);

// Library version, static storage.
const char *qe_version(void);

// Fills `out` with the default optimizer settings.
//
// # Safety
// `out` must be null or point to writable memory for one struct.
QeStatus qe_optimizer_default(QeOptimizerConfig *out);

// Parses a state file (`dims`, `labels`, `matrix` of `[re, im]` pairs).
//
// # Safety
// `json` must be null or NUL-terminated; `out` null or writable.
QeStatus qe_state_from_json(const char *json, QeState **out);

// Serializes a state in the state-file format.
//
// # Safety
// `state` must be null or a live handle; `out` null or writable.
QeStatus qe_state_to_json(const QeState *state, char **out);

// # Safety
// `state` must be null or a handle not yet freed.
void qe_state_free(QeState *state);

// Total Hilbert-space dimension.
//
// # Safety
// `state` must be null or a live handle; `out` null or writable.
QeStatus qe_state_dim(const QeState *state, size_t *out);

// Von Neumann entropy in bits.
//
// # Safety
// `state` must be null or a live handle; `out` null or writable.
QeStatus qe_state_entropy(const QeState *state, double *out);

// Discord of a bipartite state measured on subsystem `side`. `config` may
// be null for defaults.
//
// # Safety
// Pointers must be null or valid as documented for the other functions.
QeStatus qe_discord(const QeState *state,
                    const char *side,
                    const QeOptimizerConfig *config,
                    QeCorrelations *out);

// Parses `{"kraus": [matrix, …]}`.
//
// # Safety
// `json` must be null or NUL-terminated; `out` null or writable.
QeStatus qe_channel_from_json(const char *json, QeChannel **out);

// # Safety
// `channel` must be null or a handle not yet freed.
void qe_channel_free(QeChannel *channel);

// Applies `channel` to subsystem `side`; the result is a new handle.
//
// # Safety
// Pointers must be null or valid as documented for the other functions.
QeStatus qe_apply_local_channel(const QeChannel *channel,
                                const QeState *state,
                                const char *side,
                                QeState **out);

// Runs scenario `name` (`bleach`, `thermalize`, `dephase`, `landauer`) and
// writes the JSON report to `report`. `params_json` may be null; otherwise
// an object with optional `side`, `beta`, `dist`, `energies`, `optimizer`.
// Returns `BOUND_VIOLATION` with the report filled if any check fails.
//
// # Safety
// Pointers must be null or valid as documented for the other functions.
QeStatus qe_run_scenario(const char *name,
                         const QeState *state,
                         const char *params_json,
                         char **report);

// Monte Carlo sweep over random states on `A ⊗ B` and random channels on
// `B` with at most `kraus_count` Kraus operators. `quantum_classical`
// selects quantum-classical initial states. Returns `BOUND_VIOLATION` with
// `out` filled if any check fails.
//
// # Safety
// `config` null or valid; `out` null or writable.
QeStatus qe_montecarlo(uint64_t seed,
                       size_t dim_a,
                       size_t dim_b,
                       size_t env_dim,
                       size_t kraus_count,
                       size_t trials,
                       bool quantum_classical,
                       const QeOptimizerConfig *config,
                       QeMonteCarloSummary *out);

// Releases a string returned by this library.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void qe_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QERASE_H */
