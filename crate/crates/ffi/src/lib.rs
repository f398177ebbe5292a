//! C ABI for the helisheet toolkit.
//!
//! Surfaces are opaque handles created by the constructors or loaded from
//! `hf-1` containers.  Every fallible call returns an [`HsStatus`]; on
//! failure the thread-local message from [`hs_last_error_message`] describes
//! what went wrong.  Pointers returned by this library must be released with
//! the matching `hs_*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use helisheet::asym::{laurent_fit, LaurentConfig};
use helisheet::error::Error;
use helisheet::fit::{bilipschitz_estimate, fit_helicoid};
use helisheet::gauss::trace_level_set;
use helisheet::geometry::curvature::graph_embed;
use helisheet::geometry::mesh::MeshPatch;
use helisheet::geometry::multigraph::MultiGraph;
use helisheet::geometry::polar::{PolarGrid, PolarRect, RadialSpacing};
use helisheet::io;
use helisheet::sheets::{certify_sheet, CertifyConfig, SheetKind};
use helisheet::solver::mse_residual;
use helisheet::surfaces::analytic::GraphFormula;
use helisheet::surfaces::generate::{helicoid_ball_mesh, HelicoidModel};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum HsStatus {
    Ok = 0,
    /// A pointer argument was null.
    NullArgument = 1,
    /// Invalid input (bad parameters, wrong container kind, ...).
    InvalidInput = 2,
    /// Filesystem or format failure.
    Io = 3,
    /// Numerical failure (solver breakdown, optimizer stagnation, ...).
    Numeric = 4,
    /// A panic was caught at the boundary.
    Panic = 5,
}

/// Opaque surface handle: a multivalued graph or a triangulated patch.
pub struct HsSurface {
    inner: Inner,
}

enum Inner {
    Graph(MultiGraph),
    Mesh(MeshPatch),
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("error").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> HsStatus {
    match err {
        Error::Io(_) | Error::Json(_) | Error::Format(_) => HsStatus::Io,
        Error::LinearSolveBreakdown(_) | Error::OptimizerStagnation { .. } => HsStatus::Numeric,
        _ => HsStatus::InvalidInput,
    }
}

fn guard<F: FnOnce() -> Result<HsStatus, Error>>(f: F) -> HsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(e)) => {
            let s = status_of(&e);
            set_error(e.to_string());
            s
        }
        Err(_) => {
            set_error("panic at FFI boundary".to_string());
            HsStatus::Panic
        }
    }
}

unsafe fn path_of<'a>(ptr: *const c_char) -> Result<&'a str, Error> {
    if ptr.is_null() {
        return Err(Error::invalid("null path"));
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| Error::invalid("path is not valid UTF-8"))
}

/// Version string of the underlying library (static storage, do not free).
#[no_mangle]
pub extern "C" fn hs_version() -> *const c_char {
    concat!("helisheet ", env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the most recent error on this thread, or null.  The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(c) => c.as_ptr(),
        None => ptr::null(),
    })
}

/// Release a surface handle.
///
/// # Safety
/// `surface` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn hs_surface_free(surface: *mut HsSurface) {
    if !surface.is_null() {
        drop(unsafe { Box::from_raw(surface) });
    }
}

/// Load an `hf-1` container (graph or mesh).
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_surface_load(
    path: *const c_char,
    out: *mut *mut HsSurface,
) -> HsStatus {
    guard(|| {
        if out.is_null() {
            return Err(Error::invalid("null output pointer"));
        }
        let p = unsafe { path_of(path) }?;
        let inner = match io::load_surface(p)? {
            io::Surface::Graph(g) => Inner::Graph(g),
            io::Surface::Mesh(m) => Inner::Mesh(m),
        };
        unsafe { *out = Box::into_raw(Box::new(HsSurface { inner })) };
        Ok(HsStatus::Ok)
    })
}

/// Save a surface to an `hf-1` container.
///
/// # Safety
/// `surface` must be a live handle; `path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hs_surface_save(
    surface: *const HsSurface,
    path: *const c_char,
) -> HsStatus {
    guard(|| {
        let s = unsafe { surface.as_ref() }.ok_or_else(|| Error::invalid("null surface"))?;
        let p = unsafe { path_of(path) }?;
        match &s.inner {
            Inner::Graph(g) => io::save_multigraph(p, g)?,
            Inner::Mesh(m) => io::save_mesh(p, m)?,
        }
        Ok(HsStatus::Ok)
    })
}

/// 0 for graphs, 1 for meshes, -1 for null.
///
/// # Safety
/// `surface` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hs_surface_kind(surface: *const HsSurface) -> i32 {
    match unsafe { surface.as_ref() } {
        Some(HsSurface { inner: Inner::Graph(_) }) => 0,
        Some(HsSurface { inner: Inner::Mesh(_) }) => 1,
        None => -1,
    }
}

/// Sample the pitch-`pitch` helicoid graph on `[r1, r2] x [-pi n, pi n]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_helicoid_graph(
    pitch: f64,
    r1: f64,
    r2: f64,
    half_turns: u32,
    n_rho: usize,
    n_theta: usize,
    out: *mut *mut HsSurface,
) -> HsStatus {
    guard(|| {
        if out.is_null() {
            return Err(Error::invalid("null output pointer"));
        }
        if pitch == 0.0 {
            return Err(Error::invalid("pitch must be nonzero"));
        }
        let rect = PolarRect::sheet(r1, r2, half_turns)?;
        let grid = PolarGrid::new(rect, n_rho, n_theta, RadialSpacing::Geometric)?;
        let g = MultiGraph::from_formula(
            grid,
            helisheet::nalgebra::Vector3::zeros(),
            GraphFormula::Helicoid { pitch },
        )?;
        unsafe { *out = Box::into_raw(Box::new(HsSurface { inner: Inner::Graph(g) })) };
        Ok(HsStatus::Ok)
    })
}

/// Parametric helicoid mesh clipped to the ball of `radius` at the origin.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_helicoid_ball_mesh(
    pitch: f64,
    radius: f64,
    n: usize,
    out: *mut *mut HsSurface,
) -> HsStatus {
    guard(|| {
        if out.is_null() {
            return Err(Error::invalid("null output pointer"));
        }
        let mesh = helicoid_ball_mesh(&HelicoidModel::axis_aligned(pitch), radius, n)?;
        unsafe { *out = Box::into_raw(Box::new(HsSurface { inner: Inner::Mesh(mesh) })) };
        Ok(HsStatus::Ok)
    })
}

fn graph_of(s: *const HsSurface) -> Result<&'static MultiGraph, Error> {
    match unsafe { s.as_ref() } {
        Some(HsSurface { inner: Inner::Graph(g) }) => Ok(g),
        Some(_) => Err(Error::invalid("expected a graph surface")),
        None => Err(Error::invalid("null surface")),
    }
}

fn mesh_of(s: *const HsSurface) -> Result<MeshPatch, Error> {
    match unsafe { s.as_ref() } {
        Some(HsSurface { inner: Inner::Mesh(m) }) => Ok(m.clone()),
        Some(HsSurface { inner: Inner::Graph(g) }) => graph_embed(g),
        None => Err(Error::invalid("null surface")),
    }
}

/// Sup of the pointwise minimal-surface-equation residual of a graph.
///
/// # Safety
/// `surface` must be a live graph handle; `sup_out` writable.
#[no_mangle]
pub unsafe extern "C" fn hs_mse_residual_sup(
    surface: *const HsSurface,
    sup_out: *mut f64,
) -> HsStatus {
    guard(|| {
        if sup_out.is_null() {
            return Err(Error::invalid("null output pointer"));
        }
        let g = graph_of(surface)?;
        let r = mse_residual(g)?;
        unsafe { *sup_out = r.sup_abs() };
        Ok(HsStatus::Ok)
    })
}

/// Certify a weak (`strong = 0`) or strong (`strong != 0`) sheet.  On
/// success `verdict_out` is 1/0 and `margin_out` the smallest relative slack.
///
/// # Safety
/// `surface` must be a live graph handle; output pointers writable.
#[no_mangle]
pub unsafe extern "C" fn hs_certify_sheet(
    surface: *const HsSurface,
    epsilon: f64,
    n_turns: u32,
    scale: f64,
    strong: i32,
    residual_tol: f64,
    verdict_out: *mut i32,
    margin_out: *mut f64,
) -> HsStatus {
    guard(|| {
        if verdict_out.is_null() || margin_out.is_null() {
            return Err(Error::invalid("null output pointer"));
        }
        let g = graph_of(surface)?;
        let kind = if strong != 0 { SheetKind::Strong } else { SheetKind::Weak };
        let cert = certify_sheet(g, epsilon, n_turns, scale, kind, &CertifyConfig { residual_tol })?;
        unsafe {
            *verdict_out = i32::from(cert.verdict);
            *margin_out = cert.margin;
        }
        Ok(HsStatus::Ok)
    })
}

/// Contour coefficient of the complex gradient at `2 r1` (real, imaginary).
///
/// # Safety
/// `surface` must be a live graph handle; output pointers writable.
#[no_mangle]
pub unsafe extern "C" fn hs_laurent_coefficient(
    surface: *const HsSurface,
    r1: f64,
    c_re: *mut f64,
    c_im: *mut f64,
) -> HsStatus {
    guard(|| {
        if c_re.is_null() || c_im.is_null() {
            return Err(Error::invalid("null output pointer"));
        }
        let g = graph_of(surface)?;
        let fit = laurent_fit(g, r1, &[2.0 * r1], &LaurentConfig::default())?;
        unsafe {
            *c_re = fit.c_re;
            *c_im = fit.c_im;
        }
        Ok(HsStatus::Ok)
    })
}

/// Number of connected components of the level set `x3 = level`.
///
/// # Safety
/// `surface` must be a live handle; `components_out` writable.
#[no_mangle]
pub unsafe extern "C" fn hs_level_components(
    surface: *const HsSurface,
    level: f64,
    components_out: *mut usize,
) -> HsStatus {
    guard(|| {
        if components_out.is_null() {
            return Err(Error::invalid("null output pointer"));
        }
        let mesh = mesh_of(surface)?;
        let trace = trace_level_set(&mesh, level)?;
        unsafe { *components_out = trace.components };
        Ok(HsStatus::Ok)
    })
}

/// Fit a helicoid to the surface and report the bi-Lipschitz interval of the
/// comparison map.
///
/// # Safety
/// `surface` must be a live handle; `lo_out` and `hi_out` writable.
#[no_mangle]
pub unsafe extern "C" fn hs_bilipschitz_interval(
    surface: *const HsSurface,
    seed: u64,
    lo_out: *mut f64,
    hi_out: *mut f64,
) -> HsStatus {
    guard(|| {
        if lo_out.is_null() || hi_out.is_null() {
            return Err(Error::invalid("null output pointer"));
        }
        let mesh = mesh_of(surface)?;
        let (model, _) = fit_helicoid(&mesh, seed)?;
        let rep = bilipschitz_estimate(&mesh, &model)?;
        unsafe {
            *lo_out = rep.interval.0;
            *hi_out = rep.interval.1;
        }
        Ok(HsStatus::Ok)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_lifecycle_and_certify() {
        let mut handle: *mut HsSurface = ptr::null_mut();
        let st = unsafe { hs_helicoid_graph(1.0, 2.0, 64.0, 2, 33, 129, &mut handle) };
        assert!(st == HsStatus::Ok && !handle.is_null());
        assert_eq!(unsafe { hs_surface_kind(handle) }, 0);

        let mut sup = f64::NAN;
        assert!(unsafe { hs_mse_residual_sup(handle, &mut sup) } == HsStatus::Ok);
        assert!(sup < 1e-10);

        // scale 2 fails the gradient bound at eps = 0.1
        let (mut verdict, mut margin) = (-1i32, f64::NAN);
        let st = unsafe { hs_certify_sheet(handle, 0.1, 2, 2.0, 0, 1e-8, &mut verdict, &mut margin) };
        assert!(st == HsStatus::Ok);
        assert_eq!(verdict, 0);
        assert!(margin < 0.0);

        let (mut re, mut im) = (0.0, 0.0);
        assert!(unsafe { hs_laurent_coefficient(handle, 2.0, &mut re, &mut im) } == HsStatus::Ok);
        assert!((re).abs() < 1e-8 && (im + 1.0).abs() < 1e-8);

        unsafe { hs_surface_free(handle) };
    }

    #[test]
    fn errors_set_messages() {
        let mut handle: *mut HsSurface = ptr::null_mut();
        let st = unsafe { hs_helicoid_graph(0.0, 1.0, 4.0, 2, 17, 65, &mut handle) };
        assert!(st == HsStatus::InvalidInput);
        let msg = unsafe { CStr::from_ptr(hs_last_error_message()) };
        assert!(msg.to_str().unwrap().contains("pitch"));
    }

    #[test]
    fn ball_mesh_levels() {
        let mut handle: *mut HsSurface = ptr::null_mut();
        let st = unsafe { hs_helicoid_ball_mesh(1.0, 6.0, 121, &mut handle) };
        assert!(st == HsStatus::Ok);
        let mut comps = 0usize;
        assert!(unsafe { hs_level_components(handle, 1.25, &mut comps) } == HsStatus::Ok);
        assert_eq!(comps, 1);
        unsafe { hs_surface_free(handle) };
    }
}
