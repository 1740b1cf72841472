#ifndef MACROLAB_H
#define MACROLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MacrolabStatus {
  MACROLAB_STATUS_OK = 0,
  MACROLAB_STATUS_NULL_POINTER = 1,
  MACROLAB_STATUS_INVALID_ARGUMENT = 2,
  MACROLAB_STATUS_DIMENSION_MISMATCH = 3,
  MACROLAB_STATUS_NOT_HERMITIAN = 4,
  MACROLAB_STATUS_INVALID_STATE = 5,
  MACROLAB_STATUS_INFEASIBLE = 6,
  MACROLAB_STATUS_NOT_CONVERGED = 7,
  MACROLAB_STATUS_ILL_CONDITIONED = 8,
  MACROLAB_STATUS_DIMENSION_CAP = 9,
  MACROLAB_STATUS_JSON = 10,
  MACROLAB_STATUS_INVALID_UTF8 = 11,
  MACROLAB_STATUS_PANIC = 12,
} MacrolabStatus;

typedef struct MacrolabCanonical MacrolabCanonical;

typedef struct MacrolabKg MacrolabKg;

typedef struct MacrolabObservables MacrolabObservables;

/**
 * Hermitian operator handle; density matrices are operators validated on use.
 */
typedef struct MacrolabOperator MacrolabOperator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next call into the library from the same thread.
 */
const char *macrolab_last_error_message(void);

/**
 * Frees a string returned by the library.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library.
 */
void macrolab_string_free(char *s);

/**
 * Builds an operator from row-major real and imaginary parts of length `dim*dim`.
 *
 * # Safety
 * `re` and `im` must point to `dim*dim` doubles; `result` must be writable.
 */
enum MacrolabStatus macrolab_operator_from_parts(size_t dim,
                                                 const double *re,
                                                 const double *im,
                                                 struct MacrolabOperator **result);

/**
 * # Safety
 * `json` must be a nul-terminated string; `result` must be writable.
 */
enum MacrolabStatus macrolab_operator_from_json(const char *json, struct MacrolabOperator **result);

/**
 * Writes a newly allocated JSON document; release it with [`macrolab_string_free`].
 *
 * # Safety
 * `op` must be a live handle; `result` must be writable.
 */
enum MacrolabStatus macrolab_operator_to_json(const struct MacrolabOperator *op, char **result);

/**
 * Copies the row-major parts into caller buffers of length `dim*dim`.
 *
 * # Safety
 * `re` and `im` must have room for `len` doubles.
 */
enum MacrolabStatus macrolab_operator_copy_parts(const struct MacrolabOperator *op,
                                                 double *re,
                                                 double *im,
                                                 size_t len);

/**
 * Dimension of the operator, or 0 for a null handle.
 *
 * # Safety
 * `op` must be null or a live handle.
 */
size_t macrolab_operator_dim(const struct MacrolabOperator *op);

/**
 * # Safety
 * `op` must be null or a handle not yet freed.
 */
void macrolab_operator_free(struct MacrolabOperator *op);

/**
 * Von Neumann entropy in nats; the operator must be a density matrix.
 *
 * # Safety
 * `state` must be a live handle; `result` must be writable.
 */
enum MacrolabStatus macrolab_von_neumann(const struct MacrolabOperator *state, double *result);

/**
 * `S(ρ‖σ)` in nats. When the supports are incompatible `*infinite` is set to
 * 1 and `*result` to 0.
 *
 * # Safety
 * Handles must be live; `result` and `infinite` must be writable.
 */
enum MacrolabStatus macrolab_relative_entropy(const struct MacrolabOperator *rho,
                                              const struct MacrolabOperator *sigma,
                                              double *result,
                                              int32_t *infinite);

/**
 * Optimal test `min tr(σΓ)` subject to `tr(ρΓ) ≥ ε`. `gamma_op` may be null
 * when the test operator is not needed.
 *
 * # Safety
 * Handles must be live; non-null out pointers must be writable.
 */
enum MacrolabStatus macrolab_np_test(const struct MacrolabOperator *rho,
                                     const struct MacrolabOperator *sigma,
                                     double epsilon,
                                     double *prob,
                                     double *power,
                                     struct MacrolabOperator **gamma_op);

/**
 * `prob_ε(ρ^{⊗N} | σ^{⊗N})` under the default dimension cap.
 *
 * # Safety
 * Handles must be live; `result` must be writable.
 */
enum MacrolabStatus macrolab_prob_eps_tensor(const struct MacrolabOperator *rho,
                                             const struct MacrolabOperator *sigma,
                                             double epsilon,
                                             size_t n,
                                             double *result);

/**
 * Observable set from `count` operator handles of dimension `dim`; the
 * handles are copied and stay owned by the caller.
 *
 * # Safety
 * `members` must point to `count` live handles.
 */
enum MacrolabStatus macrolab_observables_new(size_t dim,
                                             const struct MacrolabOperator *const *members,
                                             size_t count,
                                             struct MacrolabObservables **result);

/**
 * # Safety
 * `obs` must be null or a handle not yet freed.
 */
void macrolab_observables_free(struct MacrolabObservables *obs);

/**
 * Fits the MaxEnt state with `tr(G_a μ) = target[a]`.
 *
 * # Safety
 * `target` must hold `len` doubles; `result` must be writable.
 */
enum MacrolabStatus macrolab_fit_maxent(const struct MacrolabObservables *obs,
                                        const double *target,
                                        size_t len,
                                        struct MacrolabCanonical **result);

/**
 * Number of observables, or 0 for a null handle.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
size_t macrolab_canonical_len(const struct MacrolabCanonical *state);

/**
 * Copies `λ` into a buffer of length [`macrolab_canonical_len`].
 *
 * # Safety
 * `buf` must have room for `len` doubles.
 */
enum MacrolabStatus macrolab_canonical_lambda(const struct MacrolabCanonical *state,
                                              double *buf,
                                              size_t len);

/**
 * Copies the fitted expectations `f` into a buffer of length [`macrolab_canonical_len`].
 *
 * # Safety
 * `buf` must have room for `len` doubles.
 */
enum MacrolabStatus macrolab_canonical_f(const struct MacrolabCanonical *state,
                                         double *buf,
                                         size_t len);

/**
 * # Safety
 * `state` must be a live handle; `result` must be writable.
 */
enum MacrolabStatus macrolab_canonical_log_z(const struct MacrolabCanonical *state, double *result);

/**
 * New operator handle holding `μ`.
 *
 * # Safety
 * `state` must be a live handle; `result` must be writable.
 */
enum MacrolabStatus macrolab_canonical_mu(const struct MacrolabCanonical *state,
                                          struct MacrolabOperator **result);

/**
 * # Safety
 * `state` must be null or a handle not yet freed.
 */
void macrolab_canonical_free(struct MacrolabCanonical *state);

/**
 * Kawasaki–Gunton projector at expectations `f`.
 *
 * # Safety
 * `f` must hold `len` doubles; `result` must be writable.
 */
enum MacrolabStatus macrolab_kg_build(const struct MacrolabObservables *obs,
                                      const double *f,
                                      size_t len,
                                      struct MacrolabKg **result);

/**
 * `γ_N` of a state against the projector.
 *
 * # Safety
 * Handles must be live; `result` must be writable.
 */
enum MacrolabStatus macrolab_kg_gamma(const struct MacrolabKg *kg,
                                      const struct MacrolabOperator *rho,
                                      size_t n,
                                      double *result);

/**
 * `PΓ` on `N` copies, as a new operator handle.
 *
 * # Safety
 * Handles must be live; `result` must be writable.
 */
enum MacrolabStatus macrolab_kg_apply_observable(const struct MacrolabKg *kg,
                                                 const struct MacrolabOperator *gamma,
                                                 size_t n,
                                                 struct MacrolabOperator **result);

/**
 * # Safety
 * `kg` must be null or a handle not yet freed.
 */
void macrolab_kg_free(struct MacrolabKg *kg);

/**
 * `(ε, ε′) = ((1 − γ)/2, (1 + γ)/2)` for `0 ≤ γ < 1`.
 *
 * # Safety
 * `epsilon` and `epsilon_prime` must be writable.
 */
enum MacrolabStatus macrolab_epsilon_choices(double gamma, double *epsilon, double *epsilon_prime);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MACROLAB_H */
