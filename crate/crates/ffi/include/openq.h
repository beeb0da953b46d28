#ifndef OPENQ_H
#define OPENQ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

// Call outcome. Values 2–4 match the command-line exit codes.
typedef enum OqStatus {
  OQ_STATUS_OK = 0,
  // Invalid parameter, dimension mismatch or malformed input.
  OQ_STATUS_INVALID = 2,
  // Numerical failure: tolerance not met, horizon too short, undefined result.
  OQ_STATUS_NUMERIC = 3,
  // File or stream failure.
  OQ_STATUS_IO = 4,
  // A required pointer was null.
  OQ_STATUS_NULL_POINTER = 5,
  // A string argument was not valid UTF-8.
  OQ_STATUS_UTF8 = 6,
  // An output buffer was smaller than required.
  OQ_STATUS_BUFFER_TOO_SMALL = 7,
  // Internal panic caught at the boundary.
  OQ_STATUS_PANIC = 8,
} OqStatus;

// Direction of a one-tailed test.
typedef enum OqDirection {
  // Alternative: mean(a - b) > 0.
  OQ_DIRECTION_GREATER = 0,
  // Alternative: mean(a - b) < 0.
  OQ_DIRECTION_LESS = 1,
} OqDirection;

// Opaque density operator.
typedef struct OqDensity OqDensity;

// Opaque operator (Hamiltonian, unitary, observable).
typedef struct OqOperator OqOperator;

// Opaque radical-pair model.
typedef struct OqRadicalPair OqRadicalPair;

// Opaque bath spectral density.
typedef struct OqSpectralDensity OqSpectralDensity;

// Opaque state vector.
typedef struct OqState OqState;

// Opaque time series of density operators.
typedef struct OqTrajectory OqTrajectory;

// Recombination yields.
typedef struct OqYield {
  double singlet;
  double triplet;
  // Population left at the horizon.
  double surviving;
  // Horizon actually integrated, s.
  double horizon;
} OqYield;

// Paired one-tailed t-test outcome.
typedef struct OqTTest {
  double t_stat;
  size_t df;
  double p_one_tailed;
  double mean_diff;
  double sd_diff;
} OqTTest;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *oq_last_error_message(void);

// Library version, static storage.
const char *oq_version(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must come from this library and not have been freed.
void oq_string_free(char *s);

// Releases a state handle.
//
// # Safety
// `h` must be null or a live handle from this library.
void oq_state_free(struct OqState *h);

// Releases a operator handle.
//
// # Safety
// `h` must be null or a live handle from this library.
void oq_operator_free(struct OqOperator *h);

// Releases a density handle.
//
// # Safety
// `h` must be null or a live handle from this library.
void oq_density_free(struct OqDensity *h);

// Releases a trajectory handle.
//
// # Safety
// `h` must be null or a live handle from this library.
void oq_trajectory_free(struct OqTrajectory *h);

// Releases a spectral-density handle.
//
// # Safety
// `h` must be null or a live handle from this library.
void oq_spectral_free(struct OqSpectralDensity *h);

// Releases a radical-pair handle.
//
// # Safety
// `h` must be null or a live handle from this library.
void oq_radical_pair_free(struct OqRadicalPair *h);

// Normalized state with subsystem dimensions `dims[0..n_dims]` from
// amplitudes `re`/`im` (length = product of dims; `im` may be null).
//
// # Safety
// Pointers must be valid for the stated lengths.
enum OqStatus oq_state_new(const size_t *dims,
                           size_t n_dims,
                           const double *re,
                           const double *im,
                           struct OqState **out);

// `<a|b>`.
//
// # Safety
// Handles must be live; out-pointers writable.
enum OqStatus oq_state_inner(const struct OqState *a,
                             const struct OqState *b,
                             double *re,
                             double *im);

// `|psi><psi|`.
//
// # Safety
// `state` must be live; `out` writable.
enum OqStatus oq_state_to_density(const struct OqState *state, struct OqDensity **out);

// Operator from a row-major `dim x dim` matrix, `dim` = product of dims
// (`im` may be null).
//
// # Safety
// Pointers must be valid for the stated lengths.
enum OqStatus oq_operator_new(const size_t *dims,
                              size_t n_dims,
                              const double *re,
                              const double *im,
                              struct OqOperator **out);

// Density operator from a row-major matrix; must be Hermitian, PSD, unit trace.
//
// # Safety
// Pointers must be valid for the stated lengths.
enum OqStatus oq_density_new(const size_t *dims,
                             size_t n_dims,
                             const double *re,
                             const double *im,
                             struct OqDensity **out);

// Total Hilbert-space dimension.
//
// # Safety
// `rho` must be live; `out` writable.
enum OqStatus oq_density_dim(const struct OqDensity *rho, size_t *out);

// Matrix element `rho_ij`.
//
// # Safety
// `rho` must be live; out-pointers writable.
enum OqStatus oq_density_get(const struct OqDensity *rho,
                             size_t i,
                             size_t j,
                             double *re,
                             double *im);

// `Tr rho^2`.
//
// # Safety
// `rho` must be live; `out` writable.
enum OqStatus oq_density_purity(const struct OqDensity *rho, double *out);

// Reduced state on the subsystems `keep[0..n_keep]` (ascending).
//
// # Safety
// `rho` must be live; `keep` valid for `n_keep`; `out` writable.
enum OqStatus oq_density_partial_trace(const struct OqDensity *rho,
                                       const size_t *keep,
                                       size_t n_keep,
                                       struct OqDensity **out);

// Closed evolution `rho(t) = U rho0 U^dagger` at each of `times[0..n_times]`.
//
// # Safety
// Handles must be live; `times` valid for `n_times`; `out` writable.
enum OqStatus oq_evolve_closed(const struct OqOperator *h,
                               const struct OqDensity *rho0,
                               const double *times,
                               size_t n_times,
                               struct OqTrajectory **out);

// Lindblad evolution of one qubit with `H = omega Z / 2` and a single channel:
// `channel` 0 = dephasing `sqrt(rate) Z`, 1 = amplitude damping `sqrt(rate) sigma_-`.
//
// # Safety
// `rho0` must be live; `times` valid for `n_times`; `out` writable.
enum OqStatus oq_evolve_qubit_lindblad(uint32_t channel,
                                       double rate,
                                       double omega,
                                       const struct OqDensity *rho0,
                                       const double *times,
                                       size_t n_times,
                                       struct OqTrajectory **out);

// Number of time points.
//
// # Safety
// `traj` must be live; `out` writable.
enum OqStatus oq_trajectory_len(const struct OqTrajectory *traj, size_t *out);

// Copy of the state at time index `k`.
//
// # Safety
// `traj` must be live; `out` writable.
enum OqStatus oq_trajectory_state(const struct OqTrajectory *traj,
                                  size_t k,
                                  struct OqDensity **out);

// Trajectory as CSV (`t`, upper triangle, `purity`, `l1_coherence`); free
// with `oq_string_free`.
//
// # Safety
// `traj` must be live; `out` writable.
enum OqStatus oq_trajectory_csv(const struct OqTrajectory *traj, char **out);

// Fringe visibility of a balanced two-path state whose records overlap by
// `<E2|E1>` = `overlap_re + i overlap_im`, sampled on `points` screen points
// over one fringe period.
//
// # Safety
// `out` must be writable.
enum OqStatus oq_visibility_for_overlap(double overlap_re,
                                        double overlap_im,
                                        size_t points,
                                        double *out);

// Fringe visibility for explicit which-path records `env1`, `env2`.
//
// # Safety
// Handles must be live; `out` writable.
enum OqStatus oq_visibility_for_records(const struct OqState *env1,
                                        const struct OqState *env2,
                                        size_t points,
                                        double *out);

// Ohmic spectral density `eta w e^{-w/cutoff}` at temperature `temperature`.
//
// # Safety
// `out` must be writable.
enum OqStatus oq_spectral_ohmic(double eta,
                                double cutoff,
                                double temperature,
                                struct OqSpectralDensity **out);

// Power-law spectral density with exponent `s`.
//
// # Safety
// `out` must be writable.
enum OqStatus oq_spectral_supraohmic(double s,
                                     double eta,
                                     double cutoff,
                                     double temperature,
                                     struct OqSpectralDensity **out);

// A single bath oscillator of frequency `mode_freq` with coupling strength `strength`.
//
// # Safety
// `out` must be writable.
enum OqStatus oq_spectral_single_mode(double strength,
                                      double mode_freq,
                                      double temperature,
                                      struct OqSpectralDensity **out);

// Decoherence exponent `gamma(t)` and phase `phi(t)` for two static paths
// separated by `d`, on `n_steps + 1` points over `[0, horizon]`. Each output
// array must hold `n_steps + 1` values (`phi` may be null).
//
// # Safety
// `j` must be live; arrays writable for `len` values.
enum OqStatus oq_decoherence_exponent(const struct OqSpectralDensity *j,
                                      double d,
                                      double horizon,
                                      size_t n_steps,
                                      double *gamma,
                                      double *phi,
                                      size_t len);

// Dimensions of the decoherence-free subspaces of collective dephasing on
// `n_qubits`. Writes up to `cap` dimensions and the total count to `count`.
//
// # Safety
// `dims` writable for `cap`; `count` writable.
enum OqStatus oq_dfs_dimensions(size_t n_qubits, size_t *dims, size_t cap, size_t *count);

// Recovery fidelity of `code` ("bitflip", "phaseflip", "shor9") for the
// logical qubit `logical` after a rotation `exp(-i theta P / 2)` about `axis`
// ('x', 'y', 'z') on physical `qubit`, one value per angle in degrees.
//
// # Safety
// `code` must be a NUL-terminated string; `logical` live; arrays valid for `n`.
enum OqStatus oq_qec_fidelity_sweep(const char *code,
                                    const struct OqState *logical,
                                    char axis,
                                    size_t qubit,
                                    const double *thetas_deg,
                                    size_t n,
                                    double *fidelities);

// Radical-pair model from JSON with keys `a_iso`, `a_axial` (mT), `b_static`,
// `rf_amplitude` (uT), `rf_frequency` (Hz), `rf_axis`, `k_s`, `k_t` (1/s),
// `gamma_e` (MHz/mT); absent keys take defaults, unknown keys are rejected.
//
// # Safety
// `json` must be a NUL-terminated string; `out` writable.
enum OqStatus oq_radical_pair_from_json(const char *json, struct OqRadicalPair **out);

// Recombination yields integrated to `horizon` seconds (`<= 0` selects the
// default horizon).
//
// # Safety
// `model` must be live; `out` writable.
enum OqStatus oq_radical_pair_yield(const struct OqRadicalPair *model,
                                    double horizon,
                                    struct OqYield *out);

// Singlet probability without recombination at `times[0..n]` (s).
//
// # Safety
// `model` must be live; arrays valid for `n`.
enum OqStatus oq_radical_pair_singlet_probability(const struct OqRadicalPair *model,
                                                  const double *times,
                                                  size_t n,
                                                  double *out);

// Singlet yield with the RF field at each of `freqs[0..n]` (Hz).
//
// # Safety
// `model` must be live; arrays valid for `n`.
enum OqStatus oq_radical_pair_rf_scan(const struct OqRadicalPair *model,
                                      const double *freqs,
                                      size_t n,
                                      double horizon,
                                      double *yields);

// Paired one-tailed t-test on `a[0..n]` and `b[0..n]`.
//
// # Safety
// Arrays valid for `n`; `out` writable.
enum OqStatus oq_paired_t_test(const double *a,
                               const double *b,
                               size_t n,
                               enum OqDirection direction,
                               struct OqTTest *out);

// Power of the one-tailed paired t-test.
//
// # Safety
// `out` must be writable.
enum OqStatus oq_power(double effect,
                       double sd,
                       size_t n,
                       double alpha,
                       enum OqDirection direction,
                       double *out);

// Four-arm protocol report as JSON for the trial CSV at `path` (null selects
// the built-in HL-60 fixture); free with `oq_string_free`.
//
// # Safety
// `path` null or NUL-terminated; `out` writable.
enum OqStatus oq_stats_report_json(const char *path, char **out);

// Runs the command-line front end with `argv[0..argc]` (no program name).
// Captured stdout and stderr are returned as strings (free with
// `oq_string_free`; either out-pointer may be null); `exit_code` receives
// the process status the command line would use.
//
// # Safety
// `argv` holds `argc` NUL-terminated strings; out-pointers writable or null.
enum OqStatus oq_cli_run(const char *const *argv,
                         size_t argc,
                         char **stdout,
                         char **stderr,
                         int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPENQ_H */
