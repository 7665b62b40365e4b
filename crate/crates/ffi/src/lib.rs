//! C interface to `causal-reduce`.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `*_free` function. Every fallible call returns a
//! [`CrStatus`]; on failure the message is available from
//! [`cr_last_error`] on the same thread. Strings returned to the caller
//! are owned by the caller and released with [`cr_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use causal_reduce::bn::DiscreteBn;
use causal_reduce::formula::{derive_gformula, Format};
use causal_reduce::functionals::{eif_variance, g_functional_exact};
use causal_reduce::reduction::{reduce, ReductionReport};
use causal_reduce::taxonomy::classify;
use causal_reduce::{parse_graph, Dag, Error};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidGraph = 4,
    AssumptionViolation = 5,
    Positivity = 6,
    InvalidNetwork = 7,
    Precondition = 8,
    Other = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrFormat {
    Text = 0,
    Latex = 1,
    Json = 2,
}

/// Opaque graph handle.
pub struct CrGraph(Dag);

/// Opaque reduction report handle.
pub struct CrReport(ReductionReport);

/// Opaque discrete network handle.
pub struct CrNetwork(DiscreteBn);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CrStatus {
    match e {
        Error::Parse { .. } => CrStatus::Parse,
        Error::Cycle(_) | Error::InvalidGraph(_) | Error::UnknownLabel(_) => CrStatus::InvalidGraph,
        Error::AssumptionViolation(_) => CrStatus::AssumptionViolation,
        Error::Positivity { .. } => CrStatus::Positivity,
        Error::Normalization { .. } | Error::InvalidCpt { .. } | Error::Json(_) => CrStatus::InvalidNetwork,
        Error::Precondition(_) | Error::StateOutOfRange { .. } => CrStatus::Precondition,
        _ => CrStatus::Other,
    }
}

// Runs `f`, recording any error or panic message.
fn guard<F: FnOnce() -> Result<(), (CrStatus, String)>>(f: F) -> CrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CrStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside causal-reduce".into());
            CrStatus::Panic
        }
    }
}

fn lib<T>(r: causal_reduce::Result<T>) -> Result<T, (CrStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (CrStatus, String) {
    (CrStatus::NullPointer, "null pointer argument".into())
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, (CrStatus, String)> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (CrStatus::InvalidUtf8, "argument is not valid UTF-8".into()))
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, (CrStatus, String)> {
    p.as_ref().ok_or_else(null)
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), (CrStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

/// Message of the last failed call on this thread, or null. The caller
/// frees it with [`cr_string_free`].
#[no_mangle]
pub extern "C" fn cr_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn cr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses graph-file text.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cr_graph_parse(text: *const c_char, out: *mut *mut CrGraph) -> CrStatus {
    guard(|| {
        let g = lib(parse_graph(str_arg(text)?))?;
        put(out, Box::into_raw(Box::new(CrGraph(g))))
    })
}

/// # Safety
/// `g` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cr_graph_free(g: *mut CrGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cr_graph_vertex_count(g: *const CrGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// Number of edges, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cr_graph_edge_count(g: *const CrGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edges().len())
}

/// Graph-file text of `g`.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cr_graph_to_text(g: *const CrGraph, out: *mut *mut c_char) -> CrStatus {
    guard(|| {
        let g = ref_arg(g)?;
        put(out, owned(g.0.to_graph_text()))
    })
}

/// Taxonomy sets of `g` as JSON.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cr_taxonomy_json(g: *const CrGraph, out: *mut *mut c_char) -> CrStatus {
    guard(|| {
        let t = lib(classify(&ref_arg(g)?.0))?;
        put(out, owned(serde_json::to_string(&t).expect("taxonomy serializes")))
    })
}

/// Reduces `g`.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cr_reduce(g: *const CrGraph, out: *mut *mut CrReport) -> CrStatus {
    guard(|| {
        let r = lib(reduce(&ref_arg(g)?.0))?;
        put(out, Box::into_raw(Box::new(CrReport(r))))
    })
}

/// # Safety
/// `r` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cr_report_free(r: *mut CrReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Number of projected-out vertices, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cr_report_removed_count(r: *const CrReport) -> usize {
    r.as_ref().map_or(0, |r| r.0.removed.len())
}

/// A new graph handle holding the reduced graph.
///
/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cr_report_output(r: *const CrReport, out: *mut *mut CrGraph) -> CrStatus {
    guard(|| {
        let r = ref_arg(r)?;
        put(out, Box::into_raw(Box::new(CrGraph(r.0.output.clone()))))
    })
}

/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cr_report_json(r: *const CrReport, out: *mut *mut c_char) -> CrStatus {
    guard(|| {
        let r = ref_arg(r)?;
        put(out, owned(serde_json::to_string(&r.0).expect("report serializes")))
    })
}

/// The g-formula of `g` in the requested rendering.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cr_gformula(g: *const CrGraph, format: CrFormat, out: *mut *mut c_char) -> CrStatus {
    guard(|| {
        let f = lib(derive_gformula(&ref_arg(g)?.0))?;
        let format = match format {
            CrFormat::Text => Format::Text,
            CrFormat::Latex => Format::Latex,
            CrFormat::Json => Format::Json,
        };
        put(out, owned(f.render(format)))
    })
}

/// Parses a network from its JSON form.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cr_network_parse(json: *const c_char, out: *mut *mut CrNetwork) -> CrStatus {
    guard(|| {
        let bn = lib(DiscreteBn::from_json(str_arg(json)?))?;
        put(out, Box::into_raw(Box::new(CrNetwork(bn))))
    })
}

/// # Safety
/// `bn` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cr_network_free(bn: *mut CrNetwork) {
    if !bn.is_null() {
        drop(Box::from_raw(bn));
    }
}

/// Exact interventional mean at treatment level `a`.
///
/// # Safety
/// `bn` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cr_g_functional(bn: *const CrNetwork, a: usize, out: *mut f64) -> CrStatus {
    guard(|| {
        let v = lib(g_functional_exact(&ref_arg(bn)?.0, a))?;
        put(out, v)
    })
}

/// Exact variance of the efficient influence function at level `a`.
///
/// # Safety
/// `bn` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cr_eif_variance(bn: *const CrNetwork, a: usize, out: *mut f64) -> CrStatus {
    guard(|| {
        let v = lib(eif_variance(&ref_arg(bn)?.0, a))?;
        put(out, v)
    })
}
