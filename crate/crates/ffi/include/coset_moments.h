#ifndef COSET_MOMENTS_H
#define COSET_MOMENTS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// L-value route.
typedef enum CmMethod {
  CM_METHOD_HURWITZ = 0,
  CM_METHOD_AFE = 1,
} CmMethod;

// Result codes.
typedef enum CmStatus {
  CM_STATUS_OK = 0,
  CM_STATUS_NULL_POINTER = 1,
  CM_STATUS_INVALID_ARGUMENT = 2,
  CM_STATUS_EVEN_MODULUS = 3,
  CM_STATUS_NOT_INVERTIBLE = 4,
  CM_STATUS_NOT_PRIMITIVE = 5,
  CM_STATUS_REGIME_VIOLATION = 6,
  CM_STATUS_MODULUS_TOO_LARGE = 7,
  CM_STATUS_VERIFICATION_FAILED = 8,
  CM_STATUS_NUMERICAL_FAILURE = 9,
  CM_STATUS_IO = 10,
  CM_STATUS_PANIC = 11,
} CmStatus;

// A Dirichlet character.
typedef struct CmCharacter CmCharacter;

// Per-modulus state for L-values: unit group, V table, Hurwitz and AFE caches.
typedef struct CmContext CmContext;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *cm_last_error_message(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void cm_string_free(char *s);

// Library version, static storage.
const char *cm_version(void);

// Jacobi symbol `(b/r)` for odd positive `r`.
//
// # Safety
// `out` must be a valid pointer.
enum CmStatus cm_jacobi(int64_t b, uint64_t r, int32_t *out);

// Inverse of `a` modulo `m` in `[0, m)`.
//
// # Safety
// `out` must be a valid pointer.
enum CmStatus cm_mod_inv(int64_t a, uint64_t m, uint64_t *out);

// `Σ_{u mod r} e_r(a·u + b·u²)` for odd `r` and `gcd(b, r) = 1`.
//
// # Safety
// `re` and `im` must be valid pointers.
enum CmStatus cm_quad_gauss(int64_t a, int64_t b, uint64_t r, double *re, double *im);

// Character mod `q` with exponent vector `exps[0..n]`, one entry per prime-power
// component in increasing prime order.
//
// # Safety
// `exps` must point to `n` values and `out` must be a valid pointer.
enum CmStatus cm_character_new(uint64_t q,
                               const uint64_t *exps,
                               uintptr_t n,
                               struct CmCharacter **out);

// Releases a character. Null is ignored.
//
// # Safety
// `chi` must come from `cm_character_new` and not be freed twice.
void cm_character_free(struct CmCharacter *chi);

// `χ(m)`; zero when `gcd(m, q) > 1`.
//
// # Safety
// All pointers must be valid.
enum CmStatus cm_character_eval(const struct CmCharacter *chi, int64_t m, double *re, double *im);

// Conductor, primitivity and parity of a character.
//
// # Safety
// All pointers must be valid.
enum CmStatus cm_character_info(const struct CmCharacter *chi,
                                uint64_t *conductor,
                                bool *is_primitive,
                                bool *is_even);

// Certified Postnikov data of a primitive character for `d`. `has_b` tells
// whether `b` is defined (`d | q/d`).
//
// # Safety
// All pointers must be valid.
enum CmStatus cm_postnikov(const struct CmCharacter *chi,
                           uint64_t d,
                           int64_t *a,
                           int64_t *b,
                           bool *has_b);

// Context for L-values mod `q`; building it tabulates the cutoff function.
//
// # Safety
// `out` must be a valid pointer.
enum CmStatus cm_context_new(uint64_t q, struct CmContext **out);

// Releases a context. Null is ignored.
//
// # Safety
// `ctx` must come from `cm_context_new` and not be freed twice.
void cm_context_free(struct CmContext *ctx);

// `|L(1/2, χ)|²` for a non-principal character of the context's modulus.
// The AFE route needs `χ` primitive and even.
//
// # Safety
// All pointers must be valid.
enum CmStatus cm_l_abs_sq(const struct CmContext *ctx,
                          const struct CmCharacter *chi,
                          enum CmMethod method,
                          double *out);

// Moment report for `(q, d)` and `ψ` as a JSON object.
//
// # Safety
// All pointers must be valid; free `*json` with `cm_string_free`.
enum CmStatus cm_moment_report_json(const struct CmContext *ctx,
                                    const struct CmCharacter *psi,
                                    uint64_t d,
                                    enum CmMethod method,
                                    char **json);

// Exact `A′` phase data as JSON. `q`, `d` accept `7^239`-style factored forms and
// `a` an expression such as `1+2*7^116`.
//
// # Safety
// All pointers must be valid; free `*json` with `cm_string_free`.
enum CmStatus cm_aprime_phase_json(const char *q, const char *d, const char *a, char **json);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* COSET_MOMENTS_H */
