//! C ABI over `flagforge`.
//!
//! Every function returns an [`FfStatus`]. Objects cross the boundary as
//! opaque handles that the caller releases with the matching `_free`
//! function. Strings returned through `char **` are owned by the caller and
//! released with [`ff_string_free`]. After a non-`OK` status,
//! [`ff_last_error`] describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use flagforge::complex::{end_cohomology_dim, Complex};
use flagforge::deform::dim_bounds;
use flagforge::diffmod::{fold, homology_hilbert, minimize, DifferentialModule};
use flagforge::error::Error;
use flagforge::io::{self, Input};
use flagforge::rigidity::{ci_ext_dim, rigidity_window, CompleteIntersection};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Domain = 5,
    Panic = 6,
}

/// A chain complex of graded free modules.
pub struct FfComplex(Complex);

/// A graded differential module.
pub struct FfDiffModule(DifferentialModule);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(FfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse(_) | Error::Io(_) | Error::InvalidField(_) | Error::InvalidRing(_) => FfStatus::Parse,
            Error::Validation(_)
            | Error::HomogeneityViolation { .. }
            | Error::NonHomogeneous(_)
            | Error::ShapeMismatch(_)
            | Error::ComplexViolation(_)
            | Error::SquareNonzero(_)
            | Error::FlagViolation(_) => FfStatus::Validation,
            _ => FfStatus::Domain,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(FfStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            FfStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null("input string"));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Failure(FfStatus::InvalidUtf8, e.to_string()))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

unsafe fn ci_from_raw(degrees: *const i64, n: usize, nvars: usize) -> Result<CompleteIntersection, Failure> {
    if degrees.is_null() && n > 0 {
        return Err(null("degrees"));
    }
    let d = if n == 0 { Vec::new() } else { std::slice::from_raw_parts(degrees, n).to_vec() };
    Ok(CompleteIntersection::from_degrees(nvars, d)?)
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ff_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ff_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ff_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a complex from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_complex_from_json(json: *const c_char, out: *mut *mut FfComplex) -> FfStatus {
    guard(|| match io::parse_str(text(json)?)? {
        Input::Complex(c) => put(out, Box::into_raw(Box::new(FfComplex(c)))),
        other => Err(Failure(FfStatus::Parse, format!("input holds a {}, expected a complex", other.kind()))),
    })
}

/// # Safety
/// `c` must be a live handle; `*out` receives a string for [`ff_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ff_complex_to_json(c: *const FfComplex, out: *mut *mut c_char) -> FfStatus {
    guard(|| {
        let c = handle(c, "complex")?;
        put(out, owned_string(io::to_pretty(&io::complex_to_json(&c.0))))
    })
}

/// # Safety
/// `c` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn ff_complex_free(c: *mut FfComplex) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_complex_length(c: *const FfComplex, out: *mut usize) -> FfStatus {
    guard(|| put(out, handle(c, "complex")?.0.length()))
}

/// `dim H^i(End(C))_j`.
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_end_cohomology_dim(c: *const FfComplex, i: i64, j: i64, out: *mut usize) -> FfStatus {
    guard(|| put(out, end_cohomology_dim(&handle(c, "complex")?.0, i, j)))
}

/// Lower and upper bounds on the dimension of degree-`a` flags on `c`.
///
/// # Safety
/// `c` must be a live handle; `lo` and `hi` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_dim_bounds(c: *const FfComplex, a: i64, lo: *mut i64, hi: *mut i64) -> FfStatus {
    guard(|| {
        let (l, h) = dim_bounds(&handle(c, "complex")?.0, a);
        put(lo, l)?;
        put(hi, h)
    })
}

/// The degree-`a` fold of `c`.
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_fold(c: *const FfComplex, a: i64, out: *mut *mut FfDiffModule) -> FfStatus {
    guard(|| {
        let d = fold(&handle(c, "complex")?.0, a);
        put(out, Box::into_raw(Box::new(FfDiffModule(d))))
    })
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_dm_from_json(json: *const c_char, out: *mut *mut FfDiffModule) -> FfStatus {
    guard(|| match io::parse_str(text(json)?)? {
        Input::Dm(d) => put(out, Box::into_raw(Box::new(FfDiffModule(d)))),
        other => Err(Failure(FfStatus::Parse, format!("input holds a {}, expected a differential module", other.kind()))),
    })
}

/// # Safety
/// `d` must be a live handle; `*out` receives a string for [`ff_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ff_dm_to_json(d: *const FfDiffModule, out: *mut *mut c_char) -> FfStatus {
    guard(|| {
        let d = handle(d, "differential module")?;
        put(out, owned_string(io::to_pretty(&io::dm_to_json(&d.0))))
    })
}

/// # Safety
/// `d` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn ff_dm_free(d: *mut FfDiffModule) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_dm_rank(d: *const FfDiffModule, out: *mut usize) -> FfStatus {
    guard(|| put(out, handle(d, "differential module")?.0.rank()))
}

/// `dim H(D)_j`.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_dm_homology_dim(d: *const FfDiffModule, j: i64, out: *mut usize) -> FfStatus {
    guard(|| {
        let h = homology_hilbert(&handle(d, "differential module")?.0, j, j);
        put(out, h.get(&j).copied().unwrap_or(0))
    })
}

/// Removes unit entries. `total_betti` may be null.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_dm_minimize(
    d: *const FfDiffModule,
    out: *mut *mut FfDiffModule,
    total_betti: *mut usize,
) -> FfStatus {
    guard(|| {
        let (m, rec) = minimize(&handle(d, "differential module")?.0)?;
        if !total_betti.is_null() {
            total_betti.write(rec.total());
        }
        put(out, Box::into_raw(Box::new(FfDiffModule(m))))
    })
}

/// Non-rigid interval `[lo, hi]` of an Artinian complete intersection given
/// by its generator degrees.
///
/// # Safety
/// `degrees` must point to `n` values; `lo` and `hi` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_rigidity_window(
    degrees: *const i64,
    n: usize,
    nvars: usize,
    lo: *mut i64,
    hi: *mut i64,
) -> FfStatus {
    guard(|| {
        let w = rigidity_window(&ci_from_raw(degrees, n, nvars)?)?;
        put(lo, w.lo)?;
        put(hi, w.hi)
    })
}

/// `dim Ext^i(S/I, S/I)_j` for a complete intersection with these degrees.
///
/// # Safety
/// `degrees` must point to `n` values and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_ci_ext_dim(
    degrees: *const i64,
    n: usize,
    nvars: usize,
    i: usize,
    j: i64,
    out: *mut usize,
) -> FfStatus {
    guard(|| put(out, ci_ext_dim(&ci_from_raw(degrees, n, nvars)?, i, j)))
}
