/* C interface to the mukai-walls lattice engine. */

#ifndef MUKAI_WALLS_H
#define MUKAI_WALLS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum MwStatus {
  MwOk = 0,
  MwErrInvalidArgument = 1,
  MwErrInternal = 2,
} MwStatus;

/**
 * Opaque surface handle: validated lattice data plus the configured beta.
 */
typedef struct MwSurface MwSurface;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for this thread; valid until the next failing call.
 */
const char *mw_last_error(void);

/**
 * Free a string returned by this library.
 *
 * # Safety
 * `s` must have been returned by a `mukai-walls` function and not freed yet.
 */
void mw_string_free(char *s);

/**
 * Create a surface handle from a JSON configuration (same schema as the
 * CLI config file). On success `*out` owns the handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum MwStatus mw_surface_from_json(const char *json, struct MwSurface **out);

/**
 * Destroy a surface handle.
 *
 * # Safety
 * `surface` must come from `mw_surface_from_json` and not be freed twice.
 */
void mw_surface_free(struct MwSurface *surface);

/**
 * Frame constants of the handle: (H^2), b, r0, b0, d_min, delta.
 *
 * # Safety
 * `surface` must be a live handle; `out` a valid pointer.
 */
enum MwStatus mw_surface_report(const struct MwSurface *surface, char **out);

/**
 * Mukai pairing of two vectors given as comma-separated rationals
 * "r,c1...,s"; the result is a rational string.
 *
 * # Safety
 * All pointers must be valid; strings NUL-terminated.
 */
enum MwStatus mw_mukai_pairing(const struct MwSurface *surface,
                               const char *x,
                               const char *y,
                               char **out);

/**
 * Walls for categories at the handle's beta, with thresholds (K3 only).
 *
 * # Safety
 * All pointers must be valid.
 */
enum MwStatus mw_category_walls(const struct MwSurface *surface, char **out);

/**
 * Stability wall candidates for v over the s-interval [smin, smax] at the
 * handle's beta.
 *
 * # Safety
 * All pointers must be valid.
 */
enum MwStatus mw_stability_walls(const struct MwSurface *surface,
                                 const char *v,
                                 const char *smin,
                                 const char *smax,
                                 char **out);

/**
 * Decide a star condition (`which` in {1,2,3}) for (v, s).
 *
 * # Safety
 * All pointers must be valid.
 */
enum MwStatus mw_star_check(const struct MwSurface *surface,
                            const char *v,
                            const char *s_val,
                            int which,
                            char **out);

/**
 * Transform a parameter point (eta, s) by an isometry described in JSON.
 * An empty eta string means eta = 0.
 *
 * # Safety
 * All pointers must be valid.
 */
enum MwStatus mw_fm_param(const struct MwSurface *surface,
                          const char *iso_json,
                          const char *eta,
                          const char *s_val,
                          char **out);

/**
 * Gaussian binomial [n choose m]_q as a {"exp": "coeff"} JSON map.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum MwStatus mw_q_binomial(int n, int m, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MUKAI_WALLS_H */
