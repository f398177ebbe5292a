#ifndef HELISHEET_H
#define HELISHEET_H

/* Generated by cbindgen; edit src/lib.rs instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum {
  HS_STATUS_OK = 0,
  /**
   * A pointer argument was null.
   */
  HS_STATUS_NULL_ARGUMENT = 1,
  /**
   * Invalid input (bad parameters, wrong container kind, ...).
   */
  HS_STATUS_INVALID_INPUT = 2,
  /**
   * Filesystem or format failure.
   */
  HS_STATUS_IO = 3,
  /**
   * Numerical failure (solver breakdown, optimizer stagnation, ...).
   */
  HS_STATUS_NUMERIC = 4,
  /**
   * A panic was caught at the boundary.
   */
  HS_STATUS_PANIC = 5,
} HsStatus;

/**
 * Opaque surface handle: a multivalued graph or a triangulated patch.
 */
typedef struct HsSurface HsSurface;

/**
 * Version string of the underlying library (static storage, do not free).
 */
const char *hs_version(void);

/**
 * Message of the most recent error on this thread, or null.  The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *hs_last_error_message(void);

/**
 * Release a surface handle.
 *
 * # Safety
 * `surface` must come from this library and not have been freed already.
 */
void hs_surface_free(HsSurface *surface);

/**
 * Load an `hf-1` container (graph or mesh).
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must be writable.
 */
HsStatus hs_surface_load(const char *path, HsSurface **out);

/**
 * Save a surface to an `hf-1` container.
 *
 * # Safety
 * `surface` must be a live handle; `path` a valid NUL-terminated string.
 */
HsStatus hs_surface_save(const HsSurface *surface, const char *path);

/**
 * 0 for graphs, 1 for meshes, -1 for null.
 *
 * # Safety
 * `surface` must be a live handle or null.
 */
int32_t hs_surface_kind(const HsSurface *surface);

/**
 * Sample the pitch-`pitch` helicoid graph on `[r1, r2] x [-pi n, pi n]`.
 *
 * # Safety
 * `out` must be writable.
 */
HsStatus hs_helicoid_graph(double pitch,
                           double r1,
                           double r2,
                           uint32_t half_turns,
                           uintptr_t n_rho,
                           uintptr_t n_theta,
                           HsSurface **out);

/**
 * Parametric helicoid mesh clipped to the ball of `radius` at the origin.
 *
 * # Safety
 * `out` must be writable.
 */
HsStatus hs_helicoid_ball_mesh(double pitch, double radius, uintptr_t n, HsSurface **out);

/**
 * Sup of the pointwise minimal-surface-equation residual of a graph.
 *
 * # Safety
 * `surface` must be a live graph handle; `sup_out` writable.
 */
HsStatus hs_mse_residual_sup(const HsSurface *surface, double *sup_out);

/**
 * Certify a weak (`strong = 0`) or strong (`strong != 0`) sheet.  On
 * success `verdict_out` is 1/0 and `margin_out` the smallest relative slack.
 *
 * # Safety
 * `surface` must be a live graph handle; output pointers writable.
 */
HsStatus hs_certify_sheet(const HsSurface *surface,
                          double epsilon,
                          uint32_t n_turns,
                          double scale,
                          int32_t strong,
                          double residual_tol,
                          int32_t *verdict_out,
                          double *margin_out);

/**
 * Contour coefficient of the complex gradient at `2 r1` (real, imaginary).
 *
 * # Safety
 * `surface` must be a live graph handle; output pointers writable.
 */
HsStatus hs_laurent_coefficient(const HsSurface *surface, double r1, double *c_re, double *c_im);

/**
 * Number of connected components of the level set `x3 = level`.
 *
 * # Safety
 * `surface` must be a live handle; `components_out` writable.
 */
HsStatus hs_level_components(const HsSurface *surface, double level, uintptr_t *components_out);

/**
 * Fit a helicoid to the surface and report the bi-Lipschitz interval of the
 * comparison map.
 *
 * # Safety
 * `surface` must be a live handle; `lo_out` and `hi_out` writable.
 */
HsStatus hs_bilipschitz_interval(const HsSurface *surface,
                                 uint64_t seed,
                                 double *lo_out,
                                 double *hi_out);

#endif  /* HELISHEET_H */
