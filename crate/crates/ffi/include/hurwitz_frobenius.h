#ifndef HURWITZ_FROBENIUS_H
#define HURWITZ_FROBENIUS_H

#include <stddef.h>
#include <stdint.h>

typedef enum HfStatus {
  HF_STATUS_OK = 0,
  HF_STATUS_NULL_POINTER = 1,
  HF_STATUS_DOMAIN = 2,
  HF_STATUS_PRECISION = 3,
  HF_STATUS_POLE = 4,
  HF_STATUS_DEGENERACY = 5,
  HF_STATUS_CONDITIONING = 6,
  HF_STATUS_USAGE = 7,
  HF_STATUS_BUFFER_TOO_SMALL = 8,
  HF_STATUS_PANIC = 9,
} HfStatus;

/**
 * Opaque covering handle.
 */
typedef struct HfCovering HfCovering;

typedef struct HfComplex {
  double re;
  double im;
} HfComplex;

/**
 * Structure selector: 0 holo-s, 1 double-s, 2 double-t, 3 double-combo.
 */
typedef uint32_t HfKind;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Build the covering for three branch points.
 *
 * # Safety
 * `lambda` must point to 3 values; `out` must be writable.
 */
enum HfStatus hf_covering_new(const struct HfComplex *lambda, struct HfCovering **out);

/**
 * Release a covering; null is ignored.
 *
 * # Safety
 * `h` must come from [`hf_covering_new`] and not be used afterwards.
 */
void hf_covering_free(struct HfCovering *h);

/**
 * Modulus `mu = omega' / omega` and the half-period `omega`.
 *
 * # Safety
 * `h` must be a live handle; `mu` and `omega` writable.
 */
enum HfStatus hf_covering_periods(const struct HfCovering *h,
                                  struct HfComplex *mu,
                                  struct HfComplex *omega);

/**
 * Flat coordinates of the covering's real double; writes `dim` values (3 or 6) into `out`.
 *
 * # Safety
 * `h` live; `out` has room for `cap` values; `dim` writable.
 */
enum HfStatus hf_flat_coordinates(const struct HfCovering *h,
                                  HfKind kind,
                                  struct HfComplex sigma,
                                  struct HfComplex *out,
                                  size_t cap,
                                  size_t *dim);

/**
 * Prepotential at `n` flat coordinates.
 *
 * # Safety
 * `t` points to `n` values; `out` writable.
 */
enum HfStatus hf_eval_f(HfKind kind,
                        struct HfComplex sigma,
                        const struct HfComplex *t,
                        size_t n,
                        struct HfComplex *out);

/**
 * G-function; `three_quarter_exponent != 0` selects `t6^{-3/4}` for double-t.
 *
 * # Safety
 * `t` points to `n` values; `out` writable.
 */
enum HfStatus hf_eval_g(HfKind kind,
                        struct HfComplex sigma,
                        const struct HfComplex *t,
                        size_t n,
                        int32_t three_quarter_exponent,
                        struct HfComplex *out);

/**
 * WDVV residual at a point with the default derivative engine.
 *
 * # Safety
 * `t` points to `n` values; `residual` writable.
 */
enum HfStatus hf_wdvv_residual(HfKind kind,
                               struct HfComplex sigma,
                               const struct HfComplex *t,
                               size_t n,
                               double *residual);

/**
 * Copy the last error message of this thread, NUL-terminated and truncated to `len`.
 * Returns the full message length in bytes.
 *
 * # Safety
 * `buf` has room for `len` bytes (may be null when `len == 0`).
 */
size_t hf_last_error_message(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HURWITZ_FROBENIUS_H */
