//! C interface to `cech-core`.
//!
//! Handles are opaque and owned by the caller until passed to the matching
//! `*_free`. Every function returns a [`CechStatus`]; on failure the message
//! is available from [`cech_last_error`] on the same thread. Strings handed
//! out through `out_json` parameters must be released with
//! [`cech_string_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use cech_core::cochain::{h1, solve_coboundary, CoboundarySolution, Cochain1, CochainFile, Coefficients, Convention};
use cech_core::cover::{cover_order, Cover};
use cech_core::lift::{lift_cocycle, HomSpec, LiftStatus};
use cech_core::nerve::{build_nerve, Nerve};
use cech_core::Error;
use serde_json::json;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CechStatus {
    Ok = 0,
    InputError = 1,
    /// The computation succeeded and its answer is an obstruction.
    Obstructed = 2,
    Unsupported = 3,
    NullPointer = 4,
    Internal = 5,
    Panic = 6,
}

pub const CECH_CONVENTION_ABG: u32 = 0;
pub const CECH_CONVENTION_GBA: u32 = 1;

pub struct CechCover(Arc<Cover>);

pub struct CechNerve(Arc<Nerve>);

/// A 1-cochain on a nerve.
pub struct CechCochain(Cochain1);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(text).expect("nul bytes removed")));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

enum Failure {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

/// Runs `f`, recording the error message and converting panics.
fn guard(f: impl FnOnce() -> Result<CechStatus, Failure>) -> CechStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer: {name}"));
            CechStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            match e {
                Error::Unsupported(_) => CechStatus::Unsupported,
                Error::Consistency(_) => CechStatus::Internal,
                _ => CechStatus::InputError,
            }
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            CechStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn read_str<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Core(Error::Input(format!("{name} is not UTF-8"))))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write_json(out: *mut *mut c_char, value: &serde_json::Value) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out_json"));
    }
    let text = serde_json::to_string(value).expect("serializes");
    *out = CString::new(text).expect("JSON has no nul bytes").into_raw();
    Ok(())
}

fn convention(code: u32) -> Result<Convention, Failure> {
    match code {
        CECH_CONVENTION_ABG => Ok(Convention::Abg),
        CECH_CONVENTION_GBA => Ok(Convention::Gba),
        other => Err(Failure::Core(Error::Input(format!("unknown convention code {other}")))),
    }
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn cech_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` is null or a string returned by this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn cech_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `json` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cech_cover_from_json(json: *const c_char, out: *mut *mut CechCover) -> CechStatus {
    guard(|| {
        let cover = Cover::from_json(read_str(json, "json")?)?;
        write_out(out, CechCover(Arc::new(cover)))?;
        Ok(CechStatus::Ok)
    })
}

/// # Safety
/// `cover` is null or a live handle, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn cech_cover_free(cover: *mut CechCover) {
    if !cover.is_null() {
        drop(Box::from_raw(cover));
    }
}

/// Order of the cover; `-1` when no point is covered.
///
/// # Safety
/// `cover` is a live handle; `out_order` is writable.
#[no_mangle]
pub unsafe extern "C" fn cech_cover_order(cover: *const CechCover, out_order: *mut i64) -> CechStatus {
    guard(|| {
        let cover = deref(cover, "cover")?;
        let order = cover_order(&cover.0)?;
        if out_order.is_null() {
            return Err(Failure::Null("out_order"));
        }
        *out_order = order.order;
        Ok(CechStatus::Ok)
    })
}

/// # Safety
/// `cover` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cech_nerve_build(cover: *const CechCover, max_dim: u32, out: *mut *mut CechNerve) -> CechStatus {
    guard(|| {
        let cover = deref(cover, "cover")?;
        let nerve = build_nerve(&cover.0, max_dim as usize)?;
        write_out(out, CechNerve(Arc::new(nerve)))?;
        Ok(CechStatus::Ok)
    })
}

/// # Safety
/// `nerve` is null or a live handle, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn cech_nerve_free(nerve: *mut CechNerve) {
    if !nerve.is_null() {
        drop(Box::from_raw(nerve));
    }
}

/// Simplex counts; any output pointer may be null.
///
/// # Safety
/// `nerve` is a live handle; non-null outputs are writable.
#[no_mangle]
pub unsafe extern "C" fn cech_nerve_counts(
    nerve: *const CechNerve,
    vertices: *mut usize,
    edges: *mut usize,
    triangles: *mut usize,
) -> CechStatus {
    guard(|| {
        let nerve = &deref(nerve, "nerve")?.0;
        for (out, value) in [
            (vertices, nerve.vertex_count()),
            (edges, nerve.edges().len()),
            (triangles, nerve.triangles().len()),
        ] {
            if !out.is_null() {
                *out = value;
            }
        }
        Ok(CechStatus::Ok)
    })
}

/// # Safety
/// `nerve` is a live handle; `out_json` is writable.
#[no_mangle]
pub unsafe extern "C" fn cech_nerve_to_json(nerve: *const CechNerve, out_json: *mut *mut c_char) -> CechStatus {
    guard(|| {
        let nerve = deref(nerve, "nerve")?;
        let value = serde_json::to_value(nerve.0.to_export()).expect("serializes");
        write_json(out_json, &value)?;
        Ok(CechStatus::Ok)
    })
}

/// Parses a degree-1 cochain file against `nerve`.
///
/// # Safety
/// `nerve` is a live handle; `json` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cech_cochain_from_json(
    nerve: *const CechNerve,
    json: *const c_char,
    out: *mut *mut CechCochain,
) -> CechStatus {
    guard(|| {
        let nerve = deref(nerve, "nerve")?;
        let file = CochainFile::from_json(read_str(json, "json")?)?;
        let cochain = file.into_cochain1(nerve.0.clone())?;
        write_out(out, CechCochain(cochain))?;
        Ok(CechStatus::Ok)
    })
}

/// # Safety
/// `cochain` is null or a live handle, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn cech_cochain_free(cochain: *mut CechCochain) {
    if !cochain.is_null() {
        drop(Box::from_raw(cochain));
    }
}

/// Solves `δ₀t = r`. Returns `OBSTRUCTED` with a holonomy witness in
/// `out_json` when no solution exists.
///
/// # Safety
/// `cochain` is a live handle; `out_json` is writable.
#[no_mangle]
pub unsafe extern "C" fn cech_solve_coboundary(
    cochain: *const CechCochain,
    convention_code: u32,
    out_json: *mut *mut c_char,
) -> CechStatus {
    guard(|| {
        let r = &deref(cochain, "cochain")?.0;
        match solve_coboundary(r, convention(convention_code)?)? {
            CoboundarySolution::Solved(t) => {
                write_json(out_json, &json!({ "status": "solved", "solution": CochainFile::from_cochain0(&t) }))?;
                Ok(CechStatus::Ok)
            }
            CoboundarySolution::Obstructed { cycle, holonomy } => {
                let value = json!({
                    "status": "obstructed",
                    "cycle": cycle.vertices,
                    "holonomy": r.spec().element_to_json(&holonomy),
                });
                write_json(out_json, &value)?;
                Ok(CechStatus::Obstructed)
            }
        }
    })
}

/// First cohomology; `coefficients` is `z`, `r` or `zmod:n`.
///
/// # Safety
/// `nerve` is a live handle; `coefficients` is a nul-terminated string;
/// `out_json` is writable.
#[no_mangle]
pub unsafe extern "C" fn cech_h1(
    nerve: *const CechNerve,
    coefficients: *const c_char,
    out_json: *mut *mut c_char,
) -> CechStatus {
    guard(|| {
        let nerve = deref(nerve, "nerve")?;
        let coefficients = Coefficients::parse(read_str(coefficients, "coefficients")?)?;
        let d = h1(&nerve.0, coefficients)?;
        write_json(out_json, &serde_json::to_value(d).expect("serializes"))?;
        Ok(CechStatus::Ok)
    })
}

/// Lifts along `via` (`r-to-t`, `z-to-zmod:n`, `zmod-to-zmod:n:m`,
/// `gl-det:n`). Returns `OBSTRUCTED` when no strict lift exists.
///
/// # Safety
/// `cochain` is a live handle; `via` is a nul-terminated string;
/// `out_json` is writable.
#[no_mangle]
pub unsafe extern "C" fn cech_lift(
    cochain: *const CechCochain,
    via: *const c_char,
    out_json: *mut *mut c_char,
) -> CechStatus {
    guard(|| {
        let rho = &deref(cochain, "cochain")?.0;
        let hom = HomSpec::parse(read_str(via, "via")?)?;
        let result = lift_cocycle(rho, &hom)?;
        write_json(out_json, &result.to_json_value())?;
        Ok(if result.status == LiftStatus::Obstructed { CechStatus::Obstructed } else { CechStatus::Ok })
    })
}
