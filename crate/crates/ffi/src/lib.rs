//! C ABI over `twisted-ep`. Tuples and Katsura triples live behind opaque
//! handles; elements and reports cross the boundary as JSON strings. Every
//! call returns a [`TepStatus`]; the message of the last failure on the
//! calling thread is available from [`tep_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use serde_json::json;
use twisted_ep::algebra::{alg_mul, Reducer};
use twisted_ep::io::{self, KatsuraSpec, TermSpec, TupleSpec};
use twisted_ep::katsura::{self, KatsuraTriple};
use twisted_ep::ktheory::{self, UnitsModel};
use twisted_ep::{EpTuple, Error, Field};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TepStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Schema = 3,
    Domain = 4,
    Unsupported = 5,
    Divergence = 6,
    NotInKernel = 7,
    Construction = 8,
    Encoding = 9,
    Panic = 10,
}

pub struct TepTuple {
    inner: EpTuple,
}

pub struct TepKatsura {
    inner: KatsuraTriple,
    units: UnitsModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TepStatus {
    match e {
        Error::Schema(_) => TepStatus::Schema,
        Error::Domain(_) => TepStatus::Domain,
        Error::Unsupported(_) => TepStatus::Unsupported,
        Error::Divergence(_) => TepStatus::Divergence,
        Error::NotInKernel(_) => TepStatus::NotInKernel,
        Error::Construction(_) => TepStatus::Construction,
        Error::Encoding(_) => TepStatus::Encoding,
    }
}

enum Fail {
    Status(TepStatus, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail::Lib(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> TepStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TepStatus::Ok,
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            TepStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Status(TepStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(TepStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn field_arg(p: *const c_char) -> Result<Option<Field>, Fail> {
    if p.is_null() {
        return Ok(None);
    }
    Ok(Some(str_arg(p, "field")?.parse()?))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail::Status(TepStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail::Status(TepStatus::NullPointer, "output pointer is null".into()))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON has no nul bytes").into_raw()
}

/// Message of the last failed call on this thread, or null. Owned by the
/// library and valid until the next failing call.
#[no_mangle]
pub extern "C" fn tep_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn tep_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a tuple (or bare graph) from JSON. `field` may be null.
///
/// # Safety
/// Pointers must be valid; `out` receives a handle to free with [`tep_tuple_free`].
#[no_mangle]
pub unsafe extern "C" fn tep_tuple_from_json(
    json: *const c_char,
    field: *const c_char,
    out: *mut *mut TepTuple,
) -> TepStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let spec: TupleSpec = io::from_json(str_arg(json, "json")?)?;
        let inner = spec.build(field_arg(field)?)?;
        *out = Box::into_raw(Box::new(TepTuple { inner }));
        Ok(())
    })
}

/// # Safety
/// `t` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn tep_tuple_free(t: *mut TepTuple) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// Pointers must be valid; the string in `out` is freed with [`tep_string_free`].
#[no_mangle]
pub unsafe extern "C" fn tep_tuple_to_json(t: *const TepTuple, out: *mut *mut c_char) -> TepStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let t = handle(t, "tuple")?;
        let text = serde_json::to_string(&TupleSpec::from_tuple(&t.inner)).expect("tuple specs serialise");
        *out = c_string(text);
        Ok(())
    })
}

/// Checks the tuple laws; `valid` receives the verdict.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tep_tuple_validate(t: *const TepTuple, seed: u64, samples: usize, valid: *mut bool) -> TepStatus {
    guard(|| {
        let valid = out_ptr(valid)?;
        *valid = handle(t, "tuple")?.inner.validate(seed, samples).is_valid();
        Ok(())
    })
}

unsafe fn element(t: &EpTuple, p: *const c_char, name: &str) -> Result<twisted_ep::algebra::AlgElem, Fail> {
    let terms: Vec<TermSpec> = io::from_json(str_arg(p, name)?)?;
    Ok(io::parse_element(t, &terms)?)
}

/// Product of two elements given as JSON term arrays.
///
/// # Safety
/// Pointers must be valid; the string in `out` is freed with [`tep_string_free`].
#[no_mangle]
pub unsafe extern "C" fn tep_mul(
    t: *const TepTuple,
    x: *const c_char,
    y: *const c_char,
    out: *mut *mut c_char,
) -> TepStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let t = &handle(t, "tuple")?.inner;
        let p = alg_mul(t, &element(t, x, "x")?, &element(t, y, "y")?);
        *out = c_string(serde_json::to_string(&io::element_to_terms(t, &p)).expect("terms serialise"));
        Ok(())
    })
}

/// Normal form in the quotient algebra with the default section. A
/// `step_cap` of 0 keeps the default.
///
/// # Safety
/// Pointers must be valid; the string in `out` is freed with [`tep_string_free`].
#[no_mangle]
pub unsafe extern "C" fn tep_nf(t: *const TepTuple, x: *const c_char, step_cap: usize, out: *mut *mut c_char) -> TepStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let t = &handle(t, "tuple")?.inner;
        let x = element(t, x, "x")?;
        let mut r = Reducer::new(t)?;
        if step_cap > 0 {
            r.step_cap = step_cap;
        }
        let y = r.nf(&x)?;
        *out = c_string(serde_json::to_string(&io::element_to_terms(t, &y)).expect("terms serialise"));
        Ok(())
    })
}

/// Parses a Katsura triple `{"A", "B", "C"?, ...}`. `field` may be null.
///
/// # Safety
/// Pointers must be valid; `out` receives a handle to free with [`tep_katsura_free`].
#[no_mangle]
pub unsafe extern "C" fn tep_katsura_from_json(
    json: *const c_char,
    field: *const c_char,
    out: *mut *mut TepKatsura,
) -> TepStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let spec: KatsuraSpec = io::from_json(str_arg(json, "json")?)?;
        let inner = spec.build(field_arg(field)?)?;
        let units = spec.units(inner.field())?;
        *out = Box::into_raw(Box::new(TepKatsura { inner, units }));
        Ok(())
    })
}

/// # Safety
/// `k` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn tep_katsura_free(k: *mut TepKatsura) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// # Safety
/// Pointers must be valid; `out` receives a handle to free with [`tep_tuple_free`].
#[no_mangle]
pub unsafe extern "C" fn tep_katsura_build_tuple(k: *const TepKatsura, out: *mut *mut TepTuple) -> TepStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let inner = handle(k, "triple")?.inner.build_tuple();
        *out = Box::into_raw(Box::new(TepTuple { inner }));
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tep_katsura_is_kspi(k: *const TepKatsura, kspi: *mut bool) -> TepStatus {
    guard(|| {
        let kspi = out_ptr(kspi)?;
        *kspi = katsura::is_kspi(&handle(k, "triple")?.inner).holds();
        Ok(())
    })
}

/// `{"KH0": ..., "KH1": ...}` as JSON.
///
/// # Safety
/// Pointers must be valid; the string in `out` is freed with [`tep_string_free`].
#[no_mangle]
pub unsafe extern "C" fn tep_katsura_ktheory(k: *const TepKatsura, out: *mut *mut c_char) -> TepStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let k = handle(k, "triple")?;
        let r = ktheory::kh_groups(&ktheory::katsura_block_map(&k.inner, &k.units)?);
        *out = c_string(json!({"KH0": r.kh0.to_string(), "KH1": r.kh1.to_string()}).to_string());
        Ok(())
    })
}
