#ifndef CHIRALCHAIN_H
#define CHIRALCHAIN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call; zero is success.
 */
typedef enum {
  CHIRAL_STATUS_OK = 0,
  CHIRAL_STATUS_NULL_POINTER = 1,
  CHIRAL_STATUS_INVALID_PARAMETER = 2,
  CHIRAL_STATUS_OUT_OF_RANGE = 3,
  CHIRAL_STATUS_DIMENSION = 4,
  CHIRAL_STATUS_NOT_ANTISYMMETRIC = 5,
  CHIRAL_STATUS_DOMAIN = 6,
  CHIRAL_STATUS_CONSISTENCY = 7,
  CHIRAL_STATUS_CONFIG = 8,
  CHIRAL_STATUS_IO = 9,
  CHIRAL_STATUS_PANIC = 10,
} ChiralStatus;

/**
 * Spin component of a correlator.
 */
typedef enum {
  CHIRAL_AXIS_X = 0,
  CHIRAL_AXIS_Y = 1,
} ChiralAxis;

/**
 * Ground state of one Hamiltonian.
 */
typedef struct ChiralModel ChiralModel;

/**
 * Sudden quench between two Hamiltonians of equal size.
 */
typedef struct ChiralQuench ChiralQuench;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message on this thread into `buf` (NUL
 * terminated, truncated to `len` bytes) and returns the full message
 * length without the terminator.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t chiral_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *chiral_version(void);

/**
 * Builds the ground state of the chain with `n` sites (even, at least 4).
 *
 * # Safety
 * `model` must be a valid pointer; on success it receives a handle to
 * release with [`chiral_model_free`].
 */
ChiralStatus chiral_model_new(double gamma,
                              double d,
                              double h,
                              double alpha,
                              size_t n,
                              bool kac_normalize,
                              ChiralModel **model);

/**
 * # Safety
 * `model` must be null or a handle from [`chiral_model_new`] not yet freed.
 */
void chiral_model_free(ChiralModel *model);

/**
 * Spectral gap; zero when gapless.
 *
 * # Safety
 * `model` must be a live handle and `value` a valid pointer.
 */
ChiralStatus chiral_model_gap(const ChiralModel *model, double *value);

/**
 * Ground-state energy.
 *
 * # Safety
 * `model` must be a live handle and `value` a valid pointer.
 */
ChiralStatus chiral_model_energy(const ChiralModel *model, double *value);

/**
 * `⟨σ^z⟩`.
 *
 * # Safety
 * `model` must be a live handle and `value` a valid pointer.
 */
ChiralStatus chiral_model_magnetization(const ChiralModel *model, double *value);

/**
 * `⟨σ^a_i σ^b_{i+r}⟩` for `a, b ∈ {x, y}` and `1 <= r <= n/2`.
 *
 * # Safety
 * `model` must be a live handle and `value` a valid pointer.
 */
ChiralStatus chiral_model_spin_correlator(const ChiralModel *model,
                                          ChiralAxis a,
                                          ChiralAxis b,
                                          size_t r,
                                          double *value);

/**
 * `⟨σ^z_i σ^z_{i+r}⟩`.
 *
 * # Safety
 * `model` must be a live handle and `value` a valid pointer.
 */
ChiralStatus chiral_model_zz_correlator(const ChiralModel *model, size_t r, double *value);

/**
 * Chiral order parameter.
 *
 * # Safety
 * `model` must be a live handle and `value` a valid pointer.
 */
ChiralStatus chiral_model_chiral_order(const ChiralModel *model, double *value);

/**
 * Two-site mutual information in bits at distance `r`.
 *
 * # Safety
 * `model` must be a live handle and `value` a valid pointer.
 */
ChiralStatus chiral_model_mutual_information(const ChiralModel *model, size_t r, double *value);

/**
 * Entanglement entropy in bits of `l` contiguous sites.
 *
 * # Safety
 * `model` must be a live handle and `value` a valid pointer.
 */
ChiralStatus chiral_model_block_entropy(const ChiralModel *model, size_t l, double *value);

/**
 * Effective central charge fitted over block sizes `l_min..=l_max`.
 *
 * # Safety
 * `model` must be a live handle; `c_eff` and `r2` valid pointers.
 */
ChiralStatus chiral_model_central_charge(const ChiralModel *model,
                                         size_t l_min,
                                         size_t l_max,
                                         double *c_eff,
                                         double *r2);

/**
 * Quench from the ground state of `pre` under the Hamiltonian of `post`.
 *
 * # Safety
 * `pre` and `post` must be live model handles and `quench` a valid
 * pointer; on success it receives a handle to release with
 * [`chiral_quench_free`].
 */
ChiralStatus chiral_quench_new(const ChiralModel *pre,
                               const ChiralModel *post,
                               ChiralQuench **quench);

/**
 * # Safety
 * `quench` must be null or a handle from [`chiral_quench_new`] not yet
 * freed.
 */
void chiral_quench_free(ChiralQuench *quench);

/**
 * `C_mn(t) - C_mn(∞)` at `count` increasing times; real and imaginary
 * parts go to `re` and `im`.
 *
 * # Safety
 * `quench` must be a live handle; `times`, `re` and `im` must each point
 * to `count` elements.
 */
ChiralStatus chiral_quench_delta_correlation(const ChiralQuench *quench,
                                             size_t m,
                                             size_t n,
                                             const double *times,
                                             size_t count,
                                             double *re,
                                             double *im);

/**
 * Block entropy of `l` sites at time `t` after the quench.
 *
 * # Safety
 * `quench` must be a live handle and `value` a valid pointer.
 */
ChiralStatus chiral_quench_block_entropy(const ChiralQuench *quench,
                                         size_t l,
                                         double t,
                                         double *value);

/**
 * Steady-state mutual information and `C^xx` for `r = 1..=count`.
 *
 * # Safety
 * `quench` must be a live handle; `mutual_information` and `cxx` must
 * each point to `count` elements.
 */
ChiralStatus chiral_quench_steady_profile(const ChiralQuench *quench,
                                          size_t count,
                                          double *mutual_information,
                                          double *cxx);

/**
 * Pfaffian of a `dim × dim` complex antisymmetric matrix given row-major
 * as separate real and imaginary arrays.
 *
 * # Safety
 * `re` and `im` must each point to `dim * dim` elements; `pf_re` and
 * `pf_im` must be valid pointers.
 */
ChiralStatus chiral_pfaffian(size_t dim,
                             const double *re,
                             const double *im,
                             double *pf_re,
                             double *pf_im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHIRALCHAIN_H */
