//! C ABI for the gradings toolkit.
//!
//! Conventions:
//! - Every function returns a status code (`GR_OK` on success) or, for the
//!   accessors, a value with a documented error sentinel.
//! - Strings passed in are NUL-terminated UTF-8; strings passed out are
//!   allocated by this library and must be released with `gr_string_free`.
//! - On any nonzero status, `gr_last_error` returns a message describing the
//!   failure. The pointer stays valid until the next failing call on the
//!   same thread.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use gradings::catalog::{self, CatalogError, DiagramTag};
use gradings::grading::{verify_grading, Grading};
use gradings::json as encoding;
use gradings::json::JsonError;
use gradings::pi1::{self, Pi1Error};
use gradings::scalars::FieldDescriptor;

/// Success.
pub const GR_OK: i32 = 0;
/// Malformed input: unknown tag or name, unparsable JSON or field spelling.
pub const GR_USAGE: i32 = 1;
/// Well-formed input that fails a mathematical check.
pub const GR_VERIFICATION: i32 = 2;
/// A required pointer argument was null or not valid UTF-8.
pub const GR_NULL: i32 = 3;
/// An internal invariant failed; the library state is still usable.
pub const GR_PANIC: i32 = 4;

/// Opaque handle to a group grading of a finite-dimensional algebra.
pub struct GrGrading {
    inner: Grading,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).expect("no interior NUL"));
}

/// Message for the most recent failure on this thread. Never null; empty
/// before the first failure. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn gr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn gr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn gr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn guarded<F: FnOnce() -> i32>(f: F) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal panic".to_string());
            set_error(msg);
            GR_PANIC
        }
    }
}

/// # Safety
/// `p` must be null or point at a NUL-terminated buffer.
unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, i32> {
    if p.is_null() {
        set_error("null pointer argument".to_string());
        return Err(GR_NULL);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8".to_string());
        GR_NULL
    })
}

fn write_out(s: String, out: *mut *mut c_char) -> i32 {
    if out.is_null() {
        set_error("null output pointer".to_string());
        return GR_NULL;
    }
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            GR_OK
        }
        Err(_) => {
            set_error("output contained an interior NUL".to_string());
            GR_PANIC
        }
    }
}

/// The same default rule as the command-line tool: an explicit spelling wins,
/// truncated-polynomial tags force their prime field, everything else gets
/// the twelfth cyclotomic field.
fn resolve_field(spec: Option<&str>, tag: Option<&str>) -> Result<FieldDescriptor, i32> {
    if let Some(spec) = spec {
        if !spec.is_empty() {
            return encoding::parse_field(spec).map_err(|e| {
                set_error(format!("invalid field {spec}: {e}"));
                GR_USAGE
            });
        }
    }
    if let Some(tag) = tag {
        if let Ok(DiagramTag::Truncated(p)) = DiagramTag::parse(tag) {
            return FieldDescriptor::prime(p as u64).map_err(|e| {
                set_error(e.to_string());
                GR_USAGE
            });
        }
    }
    Ok(FieldDescriptor::cyclotomic(12).expect("valid order"))
}

fn classify_catalog(e: &CatalogError) -> i32 {
    match e {
        CatalogError::UnknownTag(_)
        | CatalogError::Unsupported(_)
        | CatalogError::BadCharacteristic { .. } => GR_USAGE,
        _ => GR_VERIFICATION,
    }
}

fn classify_pi1(e: &Pi1Error) -> i32 {
    match e {
        Pi1Error::Unsupported(_) => GR_USAGE,
        Pi1Error::Catalog(inner) => classify_catalog(inner),
        _ => GR_VERIFICATION,
    }
}

fn classify_json(e: &JsonError) -> i32 {
    match e {
        JsonError::Shape(_) | JsonError::Schema(_) | JsonError::Parse(_) => GR_USAGE,
        _ => GR_VERIFICATION,
    }
}

/// Parses a grading from its JSON document (a bare grading document or a
/// catalog entry wrapping one) and stores a handle in `*out`.
///
/// # Safety
/// `json` must be a NUL-terminated UTF-8 buffer and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gr_grading_from_json(
    json: *const c_char,
    out: *mut *mut GrGrading,
) -> i32 {
    guarded(|| {
        let text = match read_str(json) {
            Ok(t) => t,
            Err(code) => return code,
        };
        if out.is_null() {
            set_error("null output pointer".to_string());
            return GR_NULL;
        }
        let doc: serde_json::Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => {
                set_error(format!("invalid JSON: {e}"));
                return GR_USAGE;
            }
        };
        let doc = doc.get("grading").cloned().unwrap_or(doc);
        match encoding::grading_from_json(&doc) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(GrGrading { inner: g }));
                GR_OK
            }
            Err(e) => {
                let code = classify_json(&e);
                set_error(e.to_string());
                code
            }
        }
    })
}

/// Checks the grading axiom on every composable pair of basis morphisms.
/// Returns `GR_OK` when the axiom holds; `GR_VERIFICATION` with the violating
/// product in `gr_last_error` otherwise.
///
/// # Safety
/// `g` must be a live handle from `gr_grading_from_json`.
#[no_mangle]
pub unsafe extern "C" fn gr_grading_verify(g: *const GrGrading) -> i32 {
    guarded(|| {
        let Some(handle) = g.as_ref() else {
            set_error("null grading handle".to_string());
            return GR_NULL;
        };
        match verify_grading(&handle.inner) {
            Ok(_) => GR_OK,
            Err(e) => {
                set_error(e.to_string());
                GR_VERIFICATION
            }
        }
    })
}

/// Number of distinct degrees carried by basis morphisms, or -1 on error.
///
/// # Safety
/// `g` must be a live handle from `gr_grading_from_json`.
#[no_mangle]
pub unsafe extern "C" fn gr_grading_support(g: *const GrGrading) -> i64 {
    let Some(handle) = g.as_ref() else {
        set_error("null grading handle".to_string());
        return -1;
    };
    let grading = &handle.inner;
    let support: BTreeSet<String> = (0..grading.category().dimension())
        .map(|i| grading.group().render(grading.degree_by_index(i)))
        .collect();
    support.len() as i64
}

/// Total number of basis morphisms, or -1 on error.
///
/// # Safety
/// `g` must be a live handle from `gr_grading_from_json`.
#[no_mangle]
pub unsafe extern "C" fn gr_grading_dimension(g: *const GrGrading) -> i64 {
    let Some(handle) = g.as_ref() else {
        set_error("null grading handle".to_string());
        return -1;
    };
    handle.inner.category().dimension() as i64
}

/// Serializes the grading back to its JSON document.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gr_grading_to_json(g: *const GrGrading, out: *mut *mut c_char) -> i32 {
    guarded(|| {
        let Some(handle) = g.as_ref() else {
            set_error("null grading handle".to_string());
            return GR_NULL;
        };
        let doc = encoding::grading_to_json(&handle.inner);
        write_out(doc.to_string(), out)
    })
}

/// Releases a grading handle. Null is ignored.
///
/// # Safety
/// `g` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn gr_grading_free(g: *mut GrGrading) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// JSON array of the built-in grading names and summaries.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gr_catalog_list(out: *mut *mut c_char) -> i32 {
    guarded(|| {
        let names: Vec<serde_json::Value> = catalog::entry_names()
            .into_iter()
            .map(|n| serde_json::Value::String(n.to_string()))
            .collect();
        write_out(serde_json::Value::Array(names).to_string(), out)
    })
}

/// Builds a named catalog grading over `field` (null or empty for the
/// default) and returns its JSON document.
///
/// # Safety
/// `name` must be NUL-terminated UTF-8; `field` null or the same; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gr_catalog_build(
    name: *const c_char,
    field: *const c_char,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        let name = match read_str(name) {
            Ok(n) => n,
            Err(code) => return code,
        };
        let field_spec = if field.is_null() {
            None
        } else {
            match read_str(field) {
                Ok(f) => Some(f),
                Err(code) => return code,
            }
        };
        let fd = match resolve_field(field_spec, None) {
            Ok(fd) => fd,
            Err(code) => return code,
        };
        match catalog::build_entry(name, &fd) {
            Ok(entry) => write_out(encoding::entry_to_json(&entry).to_string(), out),
            Err(e) => {
                let code = classify_catalog(&e);
                set_error(e.to_string());
                code
            }
        }
    })
}

/// Computes the fundamental group of a tagged algebra and returns the JSON
/// report. `field` may be null for the default rule; `radius` 0 means the
/// default certification radius 6.
///
/// # Safety
/// `tag` must be NUL-terminated UTF-8; `field` null or the same; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gr_pi1(
    tag: *const c_char,
    field: *const c_char,
    radius: u32,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        let tag = match read_str(tag) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let field_spec = if field.is_null() {
            None
        } else {
            match read_str(field) {
                Ok(f) => Some(f),
                Err(code) => return code,
            }
        };
        let fd = match resolve_field(field_spec, Some(tag)) {
            Ok(fd) => fd,
            Err(code) => return code,
        };
        let radius = if radius == 0 { 6 } else { radius as usize };
        match pi1::fundamental_group(tag, &fd, radius) {
            Ok(result) => write_out(encoding::pi1_to_json(&result).to_string(), out),
            Err(e) => {
                let code = classify_pi1(&e);
                set_error(e.to_string());
                code
            }
        }
    })
}

/// The six-row classification table for the four-point diagonal algebra,
/// as JSON.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gr_k4_table(out: *mut *mut c_char) -> i32 {
    guarded(|| {
        let fd = FieldDescriptor::cyclotomic(12).expect("valid order");
        match catalog::k4_table_report(&fd) {
            Ok(rows) => write_out(encoding::k4_table_to_json(&rows).to_string(), out),
            Err(e) => {
                let code = classify_catalog(&e);
                set_error(e.to_string());
                code
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn cstring(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    unsafe fn take_string(p: *mut c_char) -> String {
        let s = CStr::from_ptr(p).to_str().unwrap().to_string();
        gr_string_free(p);
        s
    }

    #[test]
    fn version_is_static_and_nonempty() {
        let p = gr_version();
        assert!(!p.is_null());
        let v = unsafe { CStr::from_ptr(p) }.to_str().unwrap();
        assert!(!v.is_empty());
    }

    #[test]
    fn grading_round_trip_and_verify() {
        unsafe {
            let mut doc: *mut c_char = ptr::null_mut();
            let name = cstring("k3:C3");
            assert_eq!(gr_catalog_build(name.as_ptr(), ptr::null(), &mut doc), GR_OK);
            let text = take_string(doc);

            let json = cstring(&text);
            let mut handle: *mut GrGrading = ptr::null_mut();
            assert_eq!(gr_grading_from_json(json.as_ptr(), &mut handle), GR_OK);
            assert_eq!(gr_grading_verify(handle), GR_OK);
            assert_eq!(gr_grading_dimension(handle), 3);
            assert_eq!(gr_grading_support(handle), 3);

            let mut back: *mut c_char = ptr::null_mut();
            assert_eq!(gr_grading_to_json(handle, &mut back), GR_OK);
            let round = take_string(back);
            let a: serde_json::Value = serde_json::from_str(&text).unwrap();
            let b: serde_json::Value = serde_json::from_str(&round).unwrap();
            assert_eq!(a["grading"], b);

            gr_grading_free(handle);
        }
    }

    #[test]
    fn tampered_grading_fails_verification_with_message() {
        unsafe {
            let mut doc: *mut c_char = ptr::null_mut();
            let name = cstring("M2:good");
            assert_eq!(gr_catalog_build(name.as_ptr(), ptr::null(), &mut doc), GR_OK);
            let text = take_string(doc);
            let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
            v["grading"]["degrees"]["E_1_1"] = serde_json::Value::String("t".into());

            let json = cstring(&v.to_string());
            let mut handle: *mut GrGrading = ptr::null_mut();
            assert_eq!(gr_grading_from_json(json.as_ptr(), &mut handle), GR_OK);
            assert_eq!(gr_grading_verify(handle), GR_VERIFICATION);
            let msg = CStr::from_ptr(gr_last_error()).to_str().unwrap();
            assert!(msg.contains("E_1_1"), "unexpected message: {msg}");
            gr_grading_free(handle);
        }
    }

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            let mut handle: *mut GrGrading = ptr::null_mut();
            assert_eq!(gr_grading_from_json(ptr::null(), &mut handle), GR_NULL);
            assert_eq!(gr_grading_verify(ptr::null()), GR_NULL);
            assert_eq!(gr_grading_support(ptr::null()), -1);
            let msg = CStr::from_ptr(gr_last_error()).to_str().unwrap();
            assert!(msg.contains("null"));
        }
    }

    #[test]
    fn bad_inputs_classified_as_usage() {
        unsafe {
            let mut out: *mut c_char = ptr::null_mut();
            let bad_name = cstring("k5:C5");
            assert_eq!(gr_catalog_build(bad_name.as_ptr(), ptr::null(), &mut out), GR_USAGE);
            let bad_json = cstring("{not json");
            let mut handle: *mut GrGrading = ptr::null_mut();
            assert_eq!(gr_grading_from_json(bad_json.as_ptr(), &mut handle), GR_USAGE);
            let bad_field = cstring("F0");
            let tag = cstring("k3");
            assert_eq!(gr_pi1(tag.as_ptr(), bad_field.as_ptr(), 0, &mut out), GR_USAGE);
        }
    }

    #[test]
    fn pi1_reports_the_classified_group() {
        unsafe {
            let tag = cstring("k3");
            let mut out: *mut c_char = ptr::null_mut();
            assert_eq!(gr_pi1(tag.as_ptr(), ptr::null(), 0, &mut out), GR_OK);
            let doc: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
            assert_eq!(doc["group"]["describe"], "C2 x C3");
            assert_eq!(doc["certification"]["kind"], "exact");

            let trunc = cstring("trunc:3");
            let mut out2: *mut c_char = ptr::null_mut();
            assert_eq!(gr_pi1(trunc.as_ptr(), ptr::null(), 4, &mut out2), GR_OK);
            let doc2: serde_json::Value = serde_json::from_str(&take_string(out2)).unwrap();
            assert_eq!(doc2["group"]["describe"], "Z x C3");
            assert_eq!(doc2["certification"]["kind"], "bounded");
        }
    }

    #[test]
    fn catalog_list_and_k4_table_shapes() {
        unsafe {
            let mut out: *mut c_char = ptr::null_mut();
            assert_eq!(gr_catalog_list(&mut out), GR_OK);
            let names: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
            assert_eq!(names.as_array().unwrap().len(), 21);

            let mut table: *mut c_char = ptr::null_mut();
            assert_eq!(gr_k4_table(&mut table), GR_OK);
            let doc: serde_json::Value = serde_json::from_str(&take_string(table)).unwrap();
            assert_eq!(doc["rows"].as_array().unwrap().len(), 6);
        }
    }
}
