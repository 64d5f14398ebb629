#ifndef CAVITY_MEMORY_H
#define CAVITY_MEMORY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CqmStatus {
  CQM_STATUS_OK = 0,
  CQM_STATUS_NULL_POINTER = 1,
  CQM_STATUS_INVALID_UTF8 = 2,
  CQM_STATUS_INVALID_JSON = 3,
  CQM_STATUS_INVALID_PARAMS = 4,
  CQM_STATUS_QUADRATURE = 5,
  CQM_STATUS_ZERO_PROBABILITY = 6,
  CQM_STATUS_NUMERICAL = 7,
  CQM_STATUS_PANIC = 8,
} CqmStatus;

/**
 * Opaque model handle.
 */
typedef struct CqmModel CqmModel;

typedef struct CqmComplex {
  double re;
  double im;
} CqmComplex;

/**
 * Scattering matrix at one wavenumber, measured from the cavity resonance.
 */
typedef struct CqmScattering {
  double k;
  struct CqmComplex phase_factor;
  struct CqmComplex t_ll;
  struct CqmComplex t_rr;
  struct CqmComplex t_lr;
  struct CqmComplex t_rl;
} CqmScattering;

/**
 * Closed-form figures of merit. `cooperativity` is NaN when `gamma = 0`.
 */
typedef struct CqmMetrics {
  double cooperativity;
  double f_swap;
  double f_swap_leading;
  double f_qm;
  double p_kl;
  double p_l;
  double p_qm;
  double p_qm_conditional;
  double f_storage_retrieval;
} CqmMetrics;

/**
 * State-simulation results plus the largest deviation from the closed forms.
 */
typedef struct CqmOracle {
  double p_kl;
  double p_l;
  double p_qm;
  double fidelity;
  double loss_weight;
  double readout_probability;
  double p_qm_conditional;
  double max_closed_form_delta;
} CqmOracle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a JSON parameter set and stores a new handle in `*out`. Detector
 * efficiency starts at 1 and the quadrature at its default node counts.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum CqmStatus cqm_model_from_json(const char *json, struct CqmModel **out);

/**
 * # Safety
 * `model` is null or a handle from `cqm_model_from_json` not yet freed.
 */
void cqm_model_free(struct CqmModel *model);

/**
 * Flat detector efficiency in `(0, 1]`.
 *
 * # Safety
 * `model` must be a live handle.
 */
enum CqmStatus cqm_model_set_eta(struct CqmModel *model, double eta);

/**
 * Piecewise-linear efficiency through `(k[i], eta[i])`, clamped outside.
 *
 * # Safety
 * `model` must be a live handle; `k` and `eta` must each hold `len` values.
 */
enum CqmStatus cqm_model_set_eta_table(struct CqmModel *model,
                                       const double *k,
                                       const double *eta,
                                       size_t len);

/**
 * Node counts for the Gaussian and Lorentzian rules.
 *
 * # Safety
 * `model` must be a live handle.
 */
enum CqmStatus cqm_model_set_quadrature(struct CqmModel *model,
                                        size_t gaussian_nodes,
                                        size_t lorentzian_nodes);

/**
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum CqmStatus cqm_scattering(const struct CqmModel *model, double k, struct CqmScattering *out);

/**
 * Closed forms for the input qubit `c_l|L⟩ + c_r|R⟩`, which must be normalized.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum CqmStatus cqm_metrics(const struct CqmModel *model,
                           struct CqmComplex c_l,
                           struct CqmComplex c_r,
                           struct CqmMetrics *out);

/**
 * Storage, retrieval and readout simulated on the spectral grid.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum CqmStatus cqm_oracle(const struct CqmModel *model,
                          struct CqmComplex c_l,
                          struct CqmComplex c_r,
                          struct CqmOracle *out);

/**
 * Message for the most recent failure on this thread, or null if none.
 * Valid until the next failing call on the same thread.
 */
const char *cqm_last_error_message(void);

/**
 * Static description of a status code.
 */
const char *cqm_status_message(enum CqmStatus status);

const char *cqm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAVITY_MEMORY_H */
