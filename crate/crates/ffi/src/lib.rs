//! C ABI over the solver.
//!
//! Every function returns a [`WgStatus`]; results come back through out
//! pointers. Objects are opaque heap handles released with the matching
//! `*_free`. On failure the message for the calling thread is available from
//! [`wg_last_error_message`] until the next failing call on that thread.
//! Panics are caught at the boundary and reported as [`WgStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wg_helmholtz::assembly::ProblemSpec;
use wg_helmholtz::experiment::{self, ExperimentConfig, Solved};
use wg_helmholtz::mesh::{disk_mesh, hexagon_mesh, slit_disk_mesh, Mesh};
use wg_helmholtz::problems::{convex_problem, inhomogeneous_problem, pacman_problem, DielectricProfile};
use wg_helmholtz::special::bessel_j;
use wg_helmholtz::wg_space::Degree;

/// Result code of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    MeshError = 3,
    ProblemError = 4,
    AssemblyError = 5,
    SolveError = 6,
    AnalysisError = 7,
    Panic = 8,
}

/// Opaque triangulation.
pub struct WgMesh(Mesh);

/// Opaque boundary value problem.
pub struct WgProblem(ProblemSpec);

/// Opaque discrete solution together with the mesh it lives on.
pub struct WgSolution {
    solved: Solved,
    config: ExperimentConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    // Interior NULs cannot cross the boundary; replace them.
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: WgStatus, msg: impl ToString) -> WgStatus {
    set_error(msg.to_string());
    status
}

fn guard<F: FnOnce() -> WgStatus>(f: F) -> WgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            fail(WgStatus::Panic, msg)
        }
    }
}

fn experiment_status(e: &experiment::ExperimentError) -> WgStatus {
    use experiment::ExperimentError as E;
    match e {
        E::Mesh(_) => WgStatus::MeshError,
        E::Problem(_) | E::NoExactSolution => WgStatus::ProblemError,
        E::Assembly(_) | E::Wg(_) => WgStatus::AssemblyError,
        E::Solve(_) => WgStatus::SolveError,
        E::Analysis(_) => WgStatus::AnalysisError,
        _ => WgStatus::InvalidArgument,
    }
}

/// Stores `value` behind `out`, which must be non-null.
unsafe fn emit<T>(out: *mut *mut T, value: T) -> WgStatus {
    *out = Box::into_raw(Box::new(value));
    WgStatus::Ok
}

/// Message of the last failure on this thread, or null if there was none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn wg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Bessel function of the first kind `J_nu(x)` for `nu >= 0`, `x >= 0`.
///
/// # Safety
/// `out` must be null or point to writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn wg_bessel_j(nu: f64, x: f64, out: *mut f64) -> WgStatus {
    guard(|| {
        if out.is_null() {
            return fail(WgStatus::NullPointer, "out is null");
        }
        match bessel_j(nu, x) {
            Ok(v) => {
                *out = v;
                WgStatus::Ok
            }
            Err(e) => fail(WgStatus::InvalidArgument, e),
        }
    })
}

unsafe fn mesh_out(out: *mut *mut WgMesh, m: Result<Mesh, wg_helmholtz::mesh::MeshError>) -> WgStatus {
    if out.is_null() {
        return fail(WgStatus::NullPointer, "out is null");
    }
    match m {
        Ok(m) => emit(out, WgMesh(m)),
        Err(e) => fail(WgStatus::MeshError, e),
    }
}

/// Regular hexagon of unit circumradius split into `6 n^2` triangles.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn wg_mesh_hexagon(n: usize, out: *mut *mut WgMesh) -> WgStatus {
    guard(|| mesh_out(out, hexagon_mesh(n)))
}

/// Disk of the given radius with `rings` layers of triangles.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn wg_mesh_disk(radius: f64, rings: usize, out: *mut *mut WgMesh) -> WgStatus {
    guard(|| mesh_out(out, disk_mesh(radius, rings)))
}

/// Unit disk with a thin notch along the negative x-axis.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn wg_mesh_slit_disk(
    rings: usize,
    sectors: usize,
    notch_half_angle: f64,
    out: *mut *mut WgMesh,
) -> WgStatus {
    guard(|| mesh_out(out, slit_disk_mesh(rings, sectors, notch_half_angle)))
}

/// Releases a mesh; null is ignored.
///
/// # Safety
/// `mesh` must be null or a handle from a `wg_mesh_*` constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wg_mesh_free(mesh: *mut WgMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Vertex, triangle and edge counts plus the mesh size `h`. Any out pointer
/// may be null.
///
/// # Safety
/// `mesh` must be a live handle; non-null out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn wg_mesh_info(
    mesh: *const WgMesh,
    vertices: *mut usize,
    triangles: *mut usize,
    edges: *mut usize,
    h: *mut f64,
) -> WgStatus {
    guard(|| {
        let Some(m) = mesh.as_ref() else {
            return fail(WgStatus::NullPointer, "mesh is null");
        };
        let m = &m.0;
        if !vertices.is_null() {
            *vertices = m.num_vertices();
        }
        if !triangles.is_null() {
            *triangles = m.num_triangles();
        }
        if !edges.is_null() {
            *edges = m.num_edges();
        }
        if !h.is_null() {
            *h = m.h();
        }
        WgStatus::Ok
    })
}

unsafe fn problem_out(
    out: *mut *mut WgProblem,
    p: Result<ProblemSpec, wg_helmholtz::problems::ProblemError>,
) -> WgStatus {
    if out.is_null() {
        return fail(WgStatus::NullPointer, "out is null");
    }
    match p {
        Ok(p) => emit(out, WgProblem(p)),
        Err(e) => fail(WgStatus::ProblemError, e),
    }
}

/// Impedance problem on a convex domain with a known radial solution.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn wg_problem_convex(k: f64, out: *mut *mut WgProblem) -> WgStatus {
    guard(|| problem_out(out, convex_problem(k)))
}

/// Dirichlet problem on the notched disk with singular exponent `xi`.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn wg_problem_pacman(k: f64, xi: f64, out: *mut *mut WgProblem) -> WgStatus {
    guard(|| problem_out(out, pacman_problem(k, xi)))
}

/// Dirichlet problem with a radially varying coefficient blending
/// `1/eps1` (r < a) into `1/eps2` (r > b) on a disk of the given radius.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn wg_problem_inhomogeneous(
    k: f64,
    eps1: f64,
    eps2: f64,
    a: f64,
    b: f64,
    radius: f64,
    out: *mut *mut WgProblem,
) -> WgStatus {
    guard(|| {
        let p = DielectricProfile::new(eps1, eps2, a, b, radius).and_then(|prof| inhomogeneous_problem(k, prof));
        problem_out(out, p)
    })
}

/// Releases a problem; null is ignored.
///
/// # Safety
/// `problem` must be null or a live handle from a `wg_problem_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn wg_problem_free(problem: *mut WgProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Assembles and solves `problem` on a copy of `mesh` with polynomial degree
/// 0 or 1.
///
/// # Safety
/// `mesh` and `problem` must be live handles; `out` must be null or valid
/// for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn wg_solve(
    mesh: *const WgMesh,
    problem: *const WgProblem,
    degree: u32,
    out: *mut *mut WgSolution,
) -> WgStatus {
    guard(|| {
        let (Some(m), Some(p)) = (mesh.as_ref(), problem.as_ref()) else {
            return fail(WgStatus::NullPointer, "mesh or problem is null");
        };
        if out.is_null() {
            return fail(WgStatus::NullPointer, "out is null");
        }
        let degree = match Degree::try_from(degree as usize) {
            Ok(d) => d,
            Err(e) => return fail(WgStatus::InvalidArgument, e),
        };
        let config = ExperimentConfig { degree, max_dofs: usize::MAX, ..ExperimentConfig::default() };
        match experiment::solve_on(m.0.clone(), &p.0, &config) {
            Ok(solved) => emit(out, WgSolution { solved, config }),
            Err(e) => fail(experiment_status(&e), e),
        }
    })
}

/// Releases a solution; null is ignored.
///
/// # Safety
/// `solution` must be null or a live handle from [`wg_solve`].
#[no_mangle]
pub unsafe extern "C" fn wg_solution_free(solution: *mut WgSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Number of global unknowns, including eliminated Dirichlet DOFs.
///
/// # Safety
/// `solution` must be a live handle; `n` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wg_solution_num_dofs(solution: *const WgSolution, n: *mut usize) -> WgStatus {
    guard(|| {
        let Some(s) = solution.as_ref() else {
            return fail(WgStatus::NullPointer, "solution is null");
        };
        if n.is_null() {
            return fail(WgStatus::NullPointer, "n is null");
        }
        *n = s.solved.dofs.n_total();
        WgStatus::Ok
    })
}

/// Copies the coefficient vector (interior DOFs first, then edge DOFs) into
/// `re` and `im`, each of length `len`, which must equal the DOF count.
///
/// # Safety
/// `re` and `im` must each be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn wg_solution_coefficients(
    solution: *const WgSolution,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> WgStatus {
    guard(|| {
        let Some(s) = solution.as_ref() else {
            return fail(WgStatus::NullPointer, "solution is null");
        };
        if re.is_null() || im.is_null() {
            return fail(WgStatus::NullPointer, "output buffer is null");
        }
        let c = &s.solved.solution.coefficients;
        if c.len() != len {
            return fail(WgStatus::InvalidArgument, format!("buffer length {len}, solution has {}", c.len()));
        }
        let re = std::slice::from_raw_parts_mut(re, len);
        let im = std::slice::from_raw_parts_mut(im, len);
        for (i, z) in c.iter().enumerate() {
            re[i] = z.re;
            im[i] = z.im;
        }
        WgStatus::Ok
    })
}

/// Relative energy-type and L² errors against the L² projection of the
/// problem's exact solution. Either out pointer may be null.
///
/// # Safety
/// `solution` and `problem` must be live handles; non-null out pointers must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn wg_solution_errors(
    solution: *const WgSolution,
    problem: *const WgProblem,
    h1: *mut f64,
    l2: *mut f64,
) -> WgStatus {
    guard(|| {
        let (Some(s), Some(p)) = (solution.as_ref(), problem.as_ref()) else {
            return fail(WgStatus::NullPointer, "solution or problem is null");
        };
        match experiment::errors(&s.solved, &p.0, &s.config) {
            Ok((e1, e2)) => {
                if !h1.is_null() {
                    *h1 = e1;
                }
                if !l2.is_null() {
                    *l2 = e2;
                }
                WgStatus::Ok
            }
            Err(e) => fail(experiment_status(&e), e),
        }
    })
}
