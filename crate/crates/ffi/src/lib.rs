//! C ABI over `joinscout`.
//!
//! Every fallible call returns a [`JsStatus`]; on failure a message for the
//! calling thread is available from [`js_last_error`]. Handles are opaque and
//! must be released with their matching `*_free` function. Strings returned to
//! the caller are released with [`js_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use joinscout::discovery::discover_by_attribute;
use joinscout::metrics::{containment, continuous_quality, discrete_quality};
use joinscout::{Error, FittedParams, ProfileStore, RegressionModel, ValueSet};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Malformed = 4,
    UnknownAttribute = 5,
    LayoutMismatch = 6,
    InvalidUtf8 = 7,
    Internal = 8,
}

/// Profile store loaded from disk.
pub struct JsStore(ProfileStore);

/// Trained quality predictor loaded from disk.
pub struct JsModel(RegressionModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> JsStatus {
    match e {
        Error::Io { .. } => JsStatus::Io,
        Error::Malformed { .. } | Error::Json(_) | Error::Parse(_) => JsStatus::Malformed,
        Error::UnknownAttribute(_) => JsStatus::UnknownAttribute,
        Error::LayoutMismatch { .. } => JsStatus::LayoutMismatch,
        Error::InvalidArgument(_) | Error::Empty(_) | Error::Undefined(_) => JsStatus::InvalidArgument,
        _ => JsStatus::Internal,
    }
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), (JsStatus, String)>) -> JsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => JsStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            JsStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (JsStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, (JsStatus, String)> {
    if p.is_null() {
        return Err((JsStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (JsStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

fn null(name: &str) -> (JsStatus, String) {
    (JsStatus::NullPointer, format!("{name} is null"))
}

/// Message describing the last failure on this thread, or NULL. The pointer
/// stays valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn js_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn js_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn js_store_load(path: *const c_char, out: *mut *mut JsStore) -> JsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = str_arg(path, "path")?;
        let store = ProfileStore::load(path).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(JsStore(store)));
        Ok(())
    })
}

/// Number of profiled attributes, or 0 for NULL.
///
/// # Safety
/// `store` must be NULL or a live handle from [`js_store_load`].
#[no_mangle]
pub unsafe extern "C" fn js_store_len(store: *const JsStore) -> usize {
    store.as_ref().map_or(0, |s| s.0.len())
}

/// # Safety
/// `store` must be NULL or a handle from [`js_store_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn js_store_free(store: *mut JsStore) {
    if !store.is_null() {
        drop(Box::from_raw(store));
    }
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn js_model_load(path: *const c_char, out: *mut *mut JsModel) -> JsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = str_arg(path, "path")?;
        let model = RegressionModel::load(path).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(JsModel(model)));
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or a handle from [`js_model_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn js_model_free(model: *mut JsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Top-`k` candidates for `query` (`dataset.attribute`) as a JSON list of
/// `{dataset, attribute, score}`. Free the result with [`js_string_free`].
///
/// # Safety
/// `store` and `model` must be live handles, `query` a NUL-terminated string
/// and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn js_discover(
    store: *const JsStore,
    model: *const JsModel,
    query: *const c_char,
    k: usize,
    out_json: *mut *mut c_char,
) -> JsStatus {
    guard(|| {
        let store = &store.as_ref().ok_or_else(|| null("store"))?.0;
        let model = &model.as_ref().ok_or_else(|| null("model"))?.0;
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        let query = store.resolve(str_arg(query, "query")?).map_err(lib_err)?;
        let ranking = discover_by_attribute(store, model, &query, k).map_err(lib_err)?;
        let json = ranking.to_json().map_err(lib_err)?;
        *out_json = CString::new(json).map_err(|e| (JsStatus::Internal, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// Continuous join quality with the default fitted parameters. `strictness`
/// is the offset added to the containment mean (0, 0.25 or 0.5 by name).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn js_continuous_quality(c: f64, k: f64, strictness: f64, out: *mut f64) -> JsStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = continuous_quality(c, k, strictness, &FittedParams::default()).map_err(lib_err)?.value;
        Ok(())
    })
}

/// Discrete join quality `j / levels`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn js_discrete_quality(c: f64, k: f64, levels: u32, out: *mut f64) -> JsStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = discrete_quality(c, k, levels).map_err(lib_err)?.value;
        Ok(())
    })
}

unsafe fn value_set(values: *const *const c_char, len: usize, name: &str) -> Result<ValueSet, (JsStatus, String)> {
    if values.is_null() {
        return Err(null(name));
    }
    std::slice::from_raw_parts(values, len)
        .iter()
        .map(|&v| str_arg(v, name).map(str::to_owned))
        .collect()
}

/// Containment `|A ∩ B| / |A|` of two arrays of raw strings. Values are
/// compared as given, without preprocessing.
///
/// # Safety
/// `a` and `b` must point to `a_len` and `b_len` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn js_containment(
    a: *const *const c_char,
    a_len: usize,
    b: *const *const c_char,
    b_len: usize,
    out: *mut f64,
) -> JsStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let (a, b) = (value_set(a, a_len, "a")?, value_set(b, b_len, "b")?);
        *out = containment(&a, &b).map_err(lib_err)?;
        Ok(())
    })
}
