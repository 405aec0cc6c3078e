#ifndef WG_HELMHOLTZ_H
#define WG_HELMHOLTZ_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every exported function.
 */
typedef enum WgStatus {
  WG_STATUS_OK = 0,
  WG_STATUS_NULL_POINTER = 1,
  WG_STATUS_INVALID_ARGUMENT = 2,
  WG_STATUS_MESH_ERROR = 3,
  WG_STATUS_PROBLEM_ERROR = 4,
  WG_STATUS_ASSEMBLY_ERROR = 5,
  WG_STATUS_SOLVE_ERROR = 6,
  WG_STATUS_ANALYSIS_ERROR = 7,
  WG_STATUS_PANIC = 8,
} WgStatus;

/**
 * Opaque triangulation.
 */
typedef struct WgMesh WgMesh;

/**
 * Opaque boundary value problem.
 */
typedef struct WgProblem WgProblem;

/**
 * Opaque discrete solution together with the mesh it lives on.
 */
typedef struct WgSolution WgSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null if there was none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *wg_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *wg_version(void);

/**
 * Bessel function of the first kind `J_nu(x)` for `nu >= 0`, `x >= 0`.
 *
 * # Safety
 * `out` must be null or point to writable memory for one `double`.
 */
enum WgStatus wg_bessel_j(double nu, double x, double *out);

/**
 * Regular hexagon of unit circumradius split into `6 n^2` triangles.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum WgStatus wg_mesh_hexagon(size_t n, struct WgMesh **out);

/**
 * Disk of the given radius with `rings` layers of triangles.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum WgStatus wg_mesh_disk(double radius, size_t rings, struct WgMesh **out);

/**
 * Unit disk with a thin notch along the negative x-axis.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum WgStatus wg_mesh_slit_disk(size_t rings,
                                size_t sectors,
                                double notch_half_angle,
                                struct WgMesh **out);

/**
 * Releases a mesh; null is ignored.
 *
 * # Safety
 * `mesh` must be null or a handle from a `wg_mesh_*` constructor, not yet freed.
 */
void wg_mesh_free(struct WgMesh *mesh);

/**
 * Vertex, triangle and edge counts plus the mesh size `h`. Any out pointer
 * may be null.
 *
 * # Safety
 * `mesh` must be a live handle; non-null out pointers must be writable.
 */
enum WgStatus wg_mesh_info(const struct WgMesh *mesh,
                           size_t *vertices,
                           size_t *triangles,
                           size_t *edges,
                           double *h);

/**
 * Impedance problem on a convex domain with a known radial solution.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum WgStatus wg_problem_convex(double k, struct WgProblem **out);

/**
 * Dirichlet problem on the notched disk with singular exponent `xi`.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum WgStatus wg_problem_pacman(double k, double xi, struct WgProblem **out);

/**
 * Dirichlet problem with a radially varying coefficient blending
 * `1/eps1` (r < a) into `1/eps2` (r > b) on a disk of the given radius.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum WgStatus wg_problem_inhomogeneous(double k,
                                       double eps1,
                                       double eps2,
                                       double a,
                                       double b,
                                       double radius,
                                       struct WgProblem **out);

/**
 * Releases a problem; null is ignored.
 *
 * # Safety
 * `problem` must be null or a live handle from a `wg_problem_*` constructor.
 */
void wg_problem_free(struct WgProblem *problem);

/**
 * Assembles and solves `problem` on a copy of `mesh` with polynomial degree
 * 0 or 1.
 *
 * # Safety
 * `mesh` and `problem` must be live handles; `out` must be null or valid
 * for writing one pointer.
 */
enum WgStatus wg_solve(const struct WgMesh *mesh,
                       const struct WgProblem *problem,
                       uint32_t degree,
                       struct WgSolution **out);

/**
 * Releases a solution; null is ignored.
 *
 * # Safety
 * `solution` must be null or a live handle from [`wg_solve`].
 */
void wg_solution_free(struct WgSolution *solution);

/**
 * Number of global unknowns, including eliminated Dirichlet DOFs.
 *
 * # Safety
 * `solution` must be a live handle; `n` must be writable.
 */
enum WgStatus wg_solution_num_dofs(const struct WgSolution *solution, size_t *n);

/**
 * Copies the coefficient vector (interior DOFs first, then edge DOFs) into
 * `re` and `im`, each of length `len`, which must equal the DOF count.
 *
 * # Safety
 * `re` and `im` must each be writable for `len` doubles.
 */
enum WgStatus wg_solution_coefficients(const struct WgSolution *solution,
                                       double *re,
                                       double *im,
                                       size_t len);

/**
 * Relative energy-type and L² errors against the L² projection of the
 * problem's exact solution. Either out pointer may be null.
 *
 * # Safety
 * `solution` and `problem` must be live handles; non-null out pointers must
 * be writable.
 */
enum WgStatus wg_solution_errors(const struct WgSolution *solution,
                                 const struct WgProblem *problem,
                                 double *h1,
                                 double *l2);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WG_HELMHOLTZ_H */
