//! C ABI over `bellgame`.
//!
//! Handles are opaque pointers owned by the caller and released with the
//! matching `*_free` function. Every fallible call returns a [`BgStatus`];
//! on failure [`bg_last_error`] describes the most recent error on the
//! calling thread. Strings returned by the library are freed with
//! [`bg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bellgame::catalog;
use bellgame::classical::{self, ClassicalConfig, ClassicalError};
use bellgame::io::{self, ParseError};
use bellgame::model::{CorrelationInequality, NonlocalGame};
use bellgame::quantum::{self, QuantumError, SeesawConfig, XorSolveConfig};
use bellgame::transform::{self, TransformError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    Validation = 4,
    Unsupported = 5,
    Solver = 6,
    Panic = 7,
}

/// A two-or-more party full-correlation Bell inequality.
pub struct BgCorrelation {
    inner: CorrelationInequality,
}

/// A nonlocal game.
pub struct BgGame {
    inner: NonlocalGame,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(BgStatus, String);

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        let status = match e {
            ParseError::Syntax { .. } => BgStatus::Syntax,
            ParseError::Validation(_) => BgStatus::Validation,
            ParseError::VersionUnsupported { .. } => BgStatus::Unsupported,
        };
        Failure(status, e.to_string())
    }
}

impl From<ClassicalError> for Failure {
    fn from(e: ClassicalError) -> Self {
        Failure(BgStatus::Solver, e.to_string())
    }
}

impl From<TransformError> for Failure {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Oracle(c) => c.into(),
            _ => Failure(BgStatus::Validation, e.to_string()),
        }
    }
}

impl From<QuantumError> for Failure {
    fn from(e: QuantumError) -> Self {
        let status = match e {
            QuantumError::DimensionCapExceeded { .. } | QuantumError::Linalg(_) | QuantumError::Model(_) => {
                BgStatus::Solver
            }
            _ => BgStatus::Unsupported,
        };
        Failure(status, e.to_string())
    }
}

impl From<catalog::CatalogError> for Failure {
    fn from(e: catalog::CatalogError) -> Self {
        Failure(BgStatus::Validation, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BgStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BgStatus::Panic
        }
    }
}

fn null() -> Failure {
    Failure(BgStatus::NullArgument, "null pointer argument".into())
}

unsafe fn text_arg<'a>(text: *const c_char) -> Result<&'a str, Failure> {
    if text.is_null() {
        return Err(null());
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|e| Failure(BgStatus::InvalidUtf8, e.to_string()))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    let c = CString::new(s).map_err(|e| Failure(BgStatus::InvalidUtf8, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn handle<'a, T>(h: *const T) -> Result<&'a T, Failure> {
    h.as_ref().ok_or_else(null)
}

unsafe fn put_f64(out: *mut f64, v: f64) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    *out = v;
    Ok(())
}

/// Message for the last failed call on this thread, empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn bg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_correlation_chsh(out: *mut *mut BgCorrelation) -> BgStatus {
    guard(|| put(out, BgCorrelation { inner: catalog::chsh() }))
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_correlation_gisin(n: usize, out: *mut *mut BgCorrelation) -> BgStatus {
    guard(|| put(out, BgCorrelation { inner: catalog::gisin(n)? }))
}

/// Parses a `bell correlation v1` document.
///
/// # Safety
/// `text` must be a NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_correlation_parse(text: *const c_char, out: *mut *mut BgCorrelation) -> BgStatus {
    guard(|| {
        let inner = io::parse_correlation(text_arg(text)?)?;
        put(out, BgCorrelation { inner })
    })
}

/// # Safety
/// `h` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_correlation_to_text(h: *const BgCorrelation, out: *mut *mut c_char) -> BgStatus {
    guard(|| put_string(out, io::write_correlation(&handle(h)?.inner)))
}

/// Classical bound `C` by enumeration.
///
/// # Safety
/// `h` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_correlation_classical_bound(h: *const BgCorrelation, cap: u64, out: *mut f64) -> BgStatus {
    guard(|| {
        let cfg = ClassicalConfig { cap, threads: None };
        put_f64(out, classical::correlation_bound(&handle(h)?.inner, &cfg)?)
    })
}

/// Optimal quantum winning probability of the associated two-party XOR game.
///
/// # Safety
/// `h` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_correlation_xor_value(
    h: *const BgCorrelation,
    restarts: usize,
    seed: u64,
    out: *mut f64,
) -> BgStatus {
    guard(|| {
        let cfg = XorSolveConfig { restarts, rng_seed: seed, ..XorSolveConfig::default() };
        put_f64(out, quantum::xor_quantum_value(&handle(h)?.inner, &cfg)?.value)
    })
}

/// # Safety
/// `h` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_correlation_to_game(h: *const BgCorrelation, out: *mut *mut BgGame) -> BgStatus {
    guard(|| {
        let (inner, _) = transform::correlation_to_game(&handle(h)?.inner)?;
        put(out, BgGame { inner })
    })
}

/// # Safety
/// `h` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bg_correlation_free(h: *mut BgCorrelation) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_game_three_qutrit(out: *mut *mut BgGame) -> BgStatus {
    guard(|| {
        let (inner, _) = transform::bell_to_game(&catalog::three_qutrit())?;
        put(out, BgGame { inner })
    })
}

/// Parses a `game v1` document.
///
/// # Safety
/// `text` must be a NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_game_parse(text: *const c_char, out: *mut *mut BgGame) -> BgStatus {
    guard(|| {
        let inner = io::parse_game(text_arg(text)?)?;
        put(out, BgGame { inner })
    })
}

/// # Safety
/// `h` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_game_to_text(h: *const BgGame, out: *mut *mut c_char) -> BgStatus {
    guard(|| put_string(out, io::write_game(&handle(h)?.inner)))
}

/// Maximum and minimum classical winning probabilities.
///
/// # Safety
/// `h` must be a live handle, `max` and `min` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn bg_game_classical_value(
    h: *const BgGame,
    cap: u64,
    max: *mut f64,
    min: *mut f64,
) -> BgStatus {
    guard(|| {
        let cfg = ClassicalConfig { cap, threads: None };
        let v = classical::classical_value(&handle(h)?.inner, &cfg)?;
        put_f64(max, v.max)?;
        put_f64(min, v.min)
    })
}

/// See-saw lower bound on the quantum winning probability with local
/// dimensions `dims[0..n_dims]`.
///
/// # Safety
/// `h` must be a live handle, `dims` must point to `n_dims` values, `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_game_seesaw_value(
    h: *const BgGame,
    dims: *const usize,
    n_dims: usize,
    restarts: usize,
    seed: u64,
    out: *mut f64,
) -> BgStatus {
    guard(|| {
        if dims.is_null() {
            return Err(null());
        }
        let dims = std::slice::from_raw_parts(dims, n_dims).to_vec();
        let mut cfg = SeesawConfig::new(dims);
        cfg.restarts = restarts;
        cfg.rng_seed = seed;
        put_f64(out, quantum::seesaw_quantum_value(&handle(h)?.inner, &cfg)?.value)
    })
}

/// # Safety
/// `h` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bg_game_free(h: *mut BgGame) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn bg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn null_out_pointer_is_reported() {
        let status = unsafe { bg_correlation_chsh(ptr::null_mut()) };
        assert_eq!(status, BgStatus::NullArgument);
        let msg = unsafe { CStr::from_ptr(bg_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "null pointer argument");
    }

    #[test]
    fn error_clears_after_success() {
        let mut h = ptr::null_mut();
        unsafe {
            assert_eq!(bg_correlation_gisin(1, &mut h), BgStatus::Validation);
            assert!(!CStr::from_ptr(bg_last_error()).to_bytes().is_empty());
            assert_eq!(bg_correlation_gisin(2, &mut h), BgStatus::Ok);
            assert!(CStr::from_ptr(bg_last_error()).to_bytes().is_empty());
            bg_correlation_free(h);
        }
    }
}
