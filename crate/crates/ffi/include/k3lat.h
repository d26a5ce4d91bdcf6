/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef K3LAT_H
#define K3LAT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes.
 */
typedef enum K3latStatus {
  K3LAT_STATUS_OK = 0,
  K3LAT_STATUS_NULL_POINTER = 1,
  K3LAT_STATUS_INVALID_ARGUMENT = 2,
  K3LAT_STATUS_NOT_ISOMETRY = 3,
  K3LAT_STATUS_SINGULAR = 4,
  K3LAT_STATUS_NOT_CYCLIC = 5,
  K3LAT_STATUS_CAP_EXCEEDED = 6,
  K3LAT_STATUS_OVERFLOW = 7,
  K3LAT_STATUS_BUFFER_TOO_SMALL = 8,
  K3LAT_STATUS_INTERNAL = 9,
  K3LAT_STATUS_PANIC = 10,
} K3latStatus;

/*
 A rational isometry of a lattice.
 */
typedef struct K3latIsometry K3latIsometry;

/*
 A lattice given by an even or odd integral Gram matrix.
 */
typedef struct K3latLattice K3latLattice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the last failure on this thread, empty after a
 success. The pointer stays valid until the next call on the same thread.
 */
const char *k3lat_last_error(void);

/*
 Crate version as a static NUL-terminated string.
 */
const char *k3lat_version(void);

/*
 Looks up `U`, `E8`, `E8_minus`, `K3` or `Mukai`.

 # Safety
 `name` must be a NUL-terminated string and `out` writable.
 */
enum K3latStatus k3lat_lattice_standard(const char *name, struct K3latLattice **out);

/*
 Lattice with the symmetric `rank x rank` Gram matrix `gram`.

 # Safety
 `gram` must hold `rank * rank` values and `out` be writable.
 */
enum K3latStatus k3lat_lattice_from_gram(size_t rank,
                                         const int64_t *gram,
                                         struct K3latLattice **out);

/*
 Rank of the lattice, or 0 for a null handle.

 # Safety
 `lattice` must be null or a live handle.
 */
size_t k3lat_lattice_rank(const struct K3latLattice *lattice);

/*
 The pairing `(v, w)` of two vectors of length `rank`.

 # Safety
 `v` and `w` must hold `rank` values; `out` must be writable.
 */
enum K3latStatus k3lat_lattice_pair(const struct K3latLattice *lattice,
                                    const int64_t *v,
                                    const int64_t *w,
                                    int64_t *out);

/*
 # Safety
 `lattice` must be null or a handle not freed before.
 */
void k3lat_lattice_free(struct K3latLattice *lattice);

/*
 Isometry with entries `num[i] / den[i]`, row-major. Fails with
 `NotIsometry` when the matrix does not preserve the form.

 # Safety
 `num` and `den` must hold `rank * rank` values; `out` must be writable.
 */
enum K3latStatus k3lat_isometry_new(const struct K3latLattice *lattice,
                                    const int64_t *num,
                                    const int64_t *den,
                                    struct K3latIsometry **out);

/*
 Reflection in a primitive anisotropic vector `x` of length `rank`.

 # Safety
 `x` must hold `rank` values; `out` must be writable.
 */
enum K3latStatus k3lat_isometry_reflection(const struct K3latLattice *lattice,
                                           const int64_t *x,
                                           struct K3latIsometry **out);

/*
 `a ∘ b`.

 # Safety
 `a`, `b` must be live handles and `out` writable.
 */
enum K3latStatus k3lat_isometry_compose(const struct K3latIsometry *a,
                                        const struct K3latIsometry *b,
                                        struct K3latIsometry **out);

/*
 # Safety
 `phi` must be a live handle and `out` writable.
 */
enum K3latStatus k3lat_isometry_inverse(const struct K3latIsometry *phi,
                                        struct K3latIsometry **out);

/*
 Size of the matrix, or 0 for a null handle.

 # Safety
 `phi` must be null or a live handle.
 */
size_t k3lat_isometry_rank(const struct K3latIsometry *phi);

/*
 Entry `(row, col)` in lowest terms with a positive denominator.

 # Safety
 `phi` must be a live handle; `num` and `den` writable.
 */
enum K3latStatus k3lat_isometry_entry(const struct K3latIsometry *phi,
                                      size_t row,
                                      size_t col,
                                      int64_t *num,
                                      int64_t *den);

/*
 # Safety
 `phi` must be a live handle and `out` writable.
 */
enum K3latStatus k3lat_isometry_is_integral(const struct K3latIsometry *phi, bool *out);

/*
 # Safety
 `phi` must be null or a handle not freed before.
 */
void k3lat_isometry_free(struct K3latIsometry *phi);

/*
 Order `n` of `L / I_φ` when that group is cyclic; `NotCyclic` otherwise.

 # Safety
 `phi` must be a live handle and `out` writable.
 */
enum K3latStatus k3lat_cyclic_type(const struct K3latIsometry *phi, int64_t *out);

/*
 Elementary divisors greater than one of `L / I_φ`. `len` receives the
 count even when `cap` is too small.

 # Safety
 `out` must have room for `cap` values; `len` must be writable.
 */
enum K3latStatus k3lat_quotient_divisors(const struct K3latIsometry *phi,
                                         int64_t *out,
                                         size_t cap,
                                         size_t *len);

/*
 Writes `φ = g ∘ f_(a,b) ∘ h` with `g`, `h` integral. `left` and `right`
 receive new handles for `g` and `h`.

 # Safety
 `phi` must be a live handle of cyclic type; outputs must be writable.
 */
enum K3latStatus k3lat_double_orbit_reduce(const struct K3latIsometry *phi,
                                           int64_t *a,
                                           int64_t *b,
                                           struct K3latIsometry **left,
                                           struct K3latIsometry **right);

/*
 Reflection vectors `x_1, ..., x_k` with `φ = r_{x_1} ∘ ... ∘ r_{x_k}`,
 stored consecutively. `count` receives `k`; `out` needs `k * rank` slots.

 # Safety
 `out` must have room for `cap` values; `count` must be writable.
 */
enum K3latStatus k3lat_cartan_dieudonne(const struct K3latIsometry *phi,
                                        int64_t *out,
                                        size_t cap,
                                        size_t *count);

/*
 Mukai pairing of two vectors `(r, c_1..c_22, s)`.

 # Safety
 `v` and `w` must hold 24 values; `out` must be writable.
 */
enum K3latStatus k3lat_mukai_pairing(const int64_t *v, const int64_t *w, int64_t *out);

/*
 Elementary divisors greater than one of `L / I_ψ` for the sheaf kernel
 with `c1 = k π*x + j π̂*y` and integral part `c` (22x22, row-major; null
 means zero).

 # Safety
 `x`, `y` must hold 22 values and `c`, when not null, 484; `out` must have
 room for `cap` values and `len` be writable.
 */
enum K3latStatus k3lat_sheaf_domain(int64_t n,
                                    int64_t k,
                                    int64_t j,
                                    const int64_t *x,
                                    const int64_t *y,
                                    const int64_t *c,
                                    int64_t *out,
                                    size_t cap,
                                    size_t *len);

/*
 Checks that the degree-four kernel of the universal family sends `h` to
 `ĥ`. `k` receives the inverse of `s` mod `n`.

 # Safety
 `holds` and `k` must be writable.
 */
enum K3latStatus k3lat_universal_example(int64_t n,
                                         int64_t s,
                                         int64_t j,
                                         int64_t sign,
                                         bool *holds,
                                         int64_t *k);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* K3LAT_H */
