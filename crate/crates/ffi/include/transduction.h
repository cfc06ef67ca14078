#ifndef TRANSDUCTION_H
#define TRANSDUCTION_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define STC_OK 0

#define STC_ERR_INVALID_ARGUMENT 1

#define STC_ERR_BUDGET 2

#define STC_ERR_NULL_POINTER 3

/**
 * Opaque handle around validated channel parameters.
 */
typedef struct StcParams StcParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a parameter handle; writes it to `out`. The handle must be
 * released with `stc_params_free`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
int stc_params_new(double alpha_l, double alpha_h, double beta, StcParams **out);

/**
 * Releases a handle created by `stc_params_new`. Null is a no-op.
 *
 * # Safety
 * `params` must be null or a pointer returned by `stc_params_new` that
 * has not been freed yet.
 */
void stc_params_free(StcParams *params);

/**
 * Binary entropy in bits.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
int stc_binary_entropy(double p, double *out);

/**
 * Closed-form iid mutual-information rate in bits per step.
 *
 * # Safety
 * `params` must be a live handle; `out` must be a valid pointer.
 */
int stc_iid_rate(const StcParams *params, double p_h, double *out);

/**
 * Maximizes the iid rate; writes the capacity in bits per step and the
 * maximizing high-symbol probability.
 *
 * # Safety
 * `params` must be a live handle; out-pointers must be valid.
 */
int stc_capacity(const StcParams *params, double tol, double *out_value, double *out_argmax_p_h);

/**
 * Per-symbol directed-information rate diagnostics for an iid input:
 * the Cesaro average and the final conditional term at horizon `n`.
 *
 * # Safety
 * `params` must be a live handle; out-pointers must be valid.
 */
int stc_directed_info_iid(const StcParams *params,
                          double p_l,
                          uintptr_t n,
                          double *out_cesaro_bits,
                          double *out_final_term_bits);

/**
 * Structural applicability check; writes 1 or 0.
 *
 * # Safety
 * `params` must be a live handle; `out_applicable` must be valid.
 */
int stc_check_conditions(const StcParams *params, int *out_applicable);

/**
 * Poisson-channel capacity in nats per unit time.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
int stc_kabanov_capacity(double c, double *out);

/**
 * Library version as a static C string.
 */
const char *stc_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TRANSDUCTION_H */
