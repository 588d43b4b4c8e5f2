//! C ABI for the slab solver.
//!
//! Every fallible function returns an `i32` status: `SLAB_OK` (0) or a
//! negative code. The text of the most recent error on the calling thread
//! is available from [`slab_last_error_message`]. Simulations live behind
//! an opaque `SlabSim` handle released with [`slab_sim_free`].
//!
//! # Safety (blanket)
//!
//! Pointer arguments must be non-null, aligned and valid for the access the
//! function performs. Handles must come from [`slab_sim_create`] and must not
//! be used after [`slab_sim_free`]. A handle must not be used from two
//! threads at once.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use slab_core::cli::RunConfig;
use slab_core::grid::Edge;
use slab_core::slab::Simulation;

pub const SLAB_OK: i32 = 0;
/// A required pointer was null.
pub const SLAB_ERR_NULL: i32 = -1;
/// The configuration text is not valid UTF-8.
pub const SLAB_ERR_UTF8: i32 = -2;
/// The configuration was rejected.
pub const SLAB_ERR_CONFIG: i32 = -3;
/// A time step failed; the handle keeps the last good state.
pub const SLAB_ERR_STEP: i32 = -4;
/// An index or buffer length is out of range.
pub const SLAB_ERR_ARGUMENT: i32 = -5;
/// A Rust panic was caught at the boundary.
pub const SLAB_ERR_PANIC: i32 = -6;

/// Opaque simulation handle.
pub struct SlabSim {
    sim: Simulation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn fail(code: i32, msg: impl Into<String>) -> i32 {
    set_error(msg);
    code
}

fn guard(f: impl FnOnce() -> i32) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => fail(SLAB_ERR_PANIC, "internal panic"),
    }
}

unsafe fn handle<'a>(sim: *const SlabSim) -> Result<&'a SlabSim, i32> {
    sim.as_ref().ok_or_else(|| fail(SLAB_ERR_NULL, "null simulation handle"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> i32 {
    if out.is_null() {
        return fail(SLAB_ERR_NULL, "null output pointer");
    }
    out.write(value);
    SLAB_OK
}

/// Message for the last failing call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn slab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Builds a simulation at t = 0 from `key = value` configuration text (the
/// same format the `slab` command reads). Output keys such as `output_dir`
/// are accepted and ignored.
#[no_mangle]
pub unsafe extern "C" fn slab_sim_create(config: *const c_char, out: *mut *mut SlabSim) -> i32 {
    guard(|| {
        if config.is_null() || out.is_null() {
            return fail(SLAB_ERR_NULL, "null argument");
        }
        let text = match CStr::from_ptr(config).to_str() {
            Ok(t) => t,
            Err(e) => return fail(SLAB_ERR_UTF8, e.to_string()),
        };
        let built = RunConfig::from_text(text)
            .and_then(|c| c.resolve())
            .and_then(|c| c.sim_config())
            .map_err(|e| e.to_string())
            .and_then(|c| Simulation::new(c).map_err(|e| e.to_string()));
        match built {
            Ok(sim) => write_out(out, Box::into_raw(Box::new(SlabSim { sim }))),
            Err(msg) => fail(SLAB_ERR_CONFIG, msg),
        }
    })
}

/// Releases a handle; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn slab_sim_free(sim: *mut SlabSim) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances `steps` time steps. On failure the handle holds the state
/// after the last successful step.
#[no_mangle]
pub unsafe extern "C" fn slab_sim_advance(sim: *mut SlabSim, steps: usize) -> i32 {
    guard(|| {
        let Some(h) = sim.as_mut() else {
            return fail(SLAB_ERR_NULL, "null simulation handle");
        };
        for _ in 0..steps {
            if let Err(e) = h.sim.advance() {
                return fail(SLAB_ERR_STEP, e.to_string());
            }
        }
        SLAB_OK
    })
}

#[no_mangle]
pub unsafe extern "C" fn slab_sim_time(sim: *const SlabSim, out: *mut f64) -> i32 {
    match handle(sim) {
        Ok(h) => write_out(out, h.sim.time()),
        Err(code) => code,
    }
}

#[no_mangle]
pub unsafe extern "C" fn slab_sim_step_index(sim: *const SlabSim, out: *mut usize) -> i32 {
    match handle(sim) {
        Ok(h) => write_out(out, h.sim.step_index()),
        Err(code) => code,
    }
}

/// Discrete mass `sum |psi|^2 * cell volume` of the current level.
#[no_mangle]
pub unsafe extern "C" fn slab_sim_mass(sim: *const SlabSim, out: *mut f64) -> i32 {
    match handle(sim) {
        Ok(h) => write_out(out, h.sim.mass()),
        Err(code) => code,
    }
}

/// Grid points along x and y (`ny` is 1 in 1D). Field values are stored
/// x-fastest: index `i + nx * j`.
#[no_mangle]
pub unsafe extern "C" fn slab_sim_shape(sim: *const SlabSim, nx: *mut usize, ny: *mut usize) -> i32 {
    let h = match handle(sim) {
        Ok(h) => h,
        Err(code) => return code,
    };
    let grid = &h.sim.config().grid;
    if nx.is_null() || ny.is_null() {
        return fail(SLAB_ERR_NULL, "null output pointer");
    }
    nx.write(grid.nx());
    ny.write(grid.ny());
    SLAB_OK
}

/// Copies the current field into `re` and `im`, each holding `len` values;
/// `len` must equal `nx * ny`.
#[no_mangle]
pub unsafe extern "C" fn slab_sim_copy_field(sim: *const SlabSim, re: *mut f64, im: *mut f64, len: usize) -> i32 {
    let h = match handle(sim) {
        Ok(h) => h,
        Err(code) => return code,
    };
    if re.is_null() || im.is_null() {
        return fail(SLAB_ERR_NULL, "null output buffer");
    }
    let field = &h.sim.field().current;
    if len != field.len() {
        return fail(SLAB_ERR_ARGUMENT, format!("buffer length {len}, field has {} points", field.len()));
    }
    let (re, im) = (std::slice::from_raw_parts_mut(re, len), std::slice::from_raw_parts_mut(im, len));
    for ((r, i), z) in re.iter_mut().zip(im.iter_mut()).zip(field) {
        *r = z.re;
        *i = z.im;
    }
    SLAB_OK
}

/// Boundary wave number in use on an edge (0 west/left, 1 east/right,
/// 2 south, 3 north), averaged along the edge in 2D.
#[no_mangle]
pub unsafe extern "C" fn slab_sim_k0(sim: *const SlabSim, edge: u32, out: *mut f64) -> i32 {
    let h = match handle(sim) {
        Ok(h) => h,
        Err(code) => return code,
    };
    let Some(&e) = Edge::ALL.get(edge as usize) else {
        return fail(SLAB_ERR_ARGUMENT, format!("edge {edge} out of range"));
    };
    match h.sim.k0_summary()[e as usize] {
        Some(k) => write_out(out, k),
        None => fail(SLAB_ERR_ARGUMENT, format!("edge {edge} has no wave-number parameter")),
    }
}
