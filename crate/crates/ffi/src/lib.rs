//! C ABI over the symsem engine.
//!
//! Every fallible call returns a [`SymsemStatus`]; on failure a message is
//! kept per thread and read with `symsem_last_error`. Models are opaque
//! handles released with `symsem_model_free`; strings handed out by the
//! library are released with `symsem_string_free`. No panic crosses the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use symsem::descriptor::{read_descriptor, validate_descriptor, DescriptorError};
use symsem::interpretation::{
    build_model, symmetrical_objects_stats, symmetry_stats, InterpretationError,
    InterpretationModel,
};
use symsem::query::{evaluate, parse_query};
use symsem::similarity::TaxonomyGraph;
use symsem::symmetry::SymmetryConfig;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymsemStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    /// Malformed JSON or a schema mismatch.
    Parse = 4,
    /// Well-formed descriptor that breaks an invariant.
    Invalid = 5,
    Config = 6,
    Analysis = 7,
    Query = 8,
    Panic = 9,
    /// An argument outside its documented range.
    InvalidArgument = 10,
}

/// Which elements the statistics cover. Passed as a `uint32_t`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymsemScope {
    Patches = 0,
    Objects = 1,
}

/// Symmetry statistics. The `has_*` flags are 0 when the mean is
/// undefined, in which case the value is 0.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SymsemStats {
    pub num_elements: u64,
    pub num_symmetric: u64,
    pub relative_symmetry: f64,
    pub mean_divergence: f64,
    pub mean_similarity: f64,
    pub has_mean_divergence: u8,
    pub has_mean_similarity: u8,
}

/// An analysed image.
pub struct SymsemModel {
    model: InterpretationModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', "?")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(SymsemStatus, String);

impl From<DescriptorError> for Failure {
    fn from(e: DescriptorError) -> Self {
        let status = match e {
            DescriptorError::Io { .. } => SymsemStatus::Io,
            DescriptorError::Validation(_) => SymsemStatus::Invalid,
            _ => SymsemStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

impl From<InterpretationError> for Failure {
    fn from(e: InterpretationError) -> Self {
        match e {
            InterpretationError::Document(d) => d.into(),
            other => Failure(SymsemStatus::Analysis, other.to_string()),
        }
    }
}

/// Runs `f`, turning failures and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SymsemStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SymsemStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SymsemStatus::Panic
        }
    }
}

/// Borrows a C string as UTF-8.
///
/// # Safety
/// `p` is null or points to a NUL-terminated string that outlives `'a`.
unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(
            SymsemStatus::NullArgument,
            format!("{what} is null"),
        ));
    }
    // SAFETY: non-null and NUL-terminated per the caller contract
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|e| Failure(SymsemStatus::InvalidUtf8, format!("{what}: {e}")))
}

fn out_string(s: String, out: *mut *mut c_char) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| Failure(SymsemStatus::Analysis, e.to_string()))?;
    // SAFETY: `out` was checked non-null by every caller
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn nonnull<T>(p: *const T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(
            SymsemStatus::NullArgument,
            format!("{what} is null"),
        ))
    } else {
        Ok(())
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn symsem_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null after a
/// success. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn symsem_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Checks a descriptor document. Writes the number of invariant
/// violations to `violations`; the status is `Invalid` when it is non-zero.
///
/// # Safety
/// `descriptor_json` is a NUL-terminated string; `violations` points to
/// writable memory.
#[no_mangle]
pub unsafe extern "C" fn symsem_validate_json(
    descriptor_json: *const c_char,
    violations: *mut u64,
) -> SymsemStatus {
    guard(|| {
        nonnull(violations, "violations")?;
        // SAFETY: forwarded caller contract
        let text = unsafe { text(descriptor_json, "descriptor_json") }?;
        let d = symsem::descriptor::parse_descriptor(text)?;
        let found = validate_descriptor(&d);
        // SAFETY: checked non-null above
        unsafe { *violations = found.len() as u64 };
        match found.first() {
            None => Ok(()),
            Some(v) => Err(Failure(SymsemStatus::Invalid, v.to_string())),
        }
    })
}

/// Analyses a descriptor document into a model. `config_toml` may be null
/// for the default configuration. The bundled taxonomy is used.
///
/// # Safety
/// String arguments are null or NUL-terminated; `out` points to writable
/// memory. On success `*out` owns a model for `symsem_model_free`.
#[no_mangle]
pub unsafe extern "C" fn symsem_analyze_json(
    descriptor_json: *const c_char,
    config_toml: *const c_char,
    out: *mut *mut SymsemModel,
) -> SymsemStatus {
    guard(|| {
        nonnull(out, "out")?;
        // SAFETY: forwarded caller contract
        let text = unsafe { text(descriptor_json, "descriptor_json") }?;
        let cfg = if config_toml.is_null() {
            SymmetryConfig::default()
        } else {
            // SAFETY: non-null, forwarded caller contract
            let toml = unsafe { self::text(config_toml, "config_toml") }?;
            SymmetryConfig::from_toml_str(toml)
                .map_err(|e| Failure(SymsemStatus::Config, e.to_string()))?
        };
        let d = read_descriptor(text)?;
        let model = build_model(&d, &cfg, &TaxonomyGraph::bundled())?;
        // SAFETY: checked non-null above
        unsafe { *out = Box::into_raw(Box::new(SymsemModel { model })) };
        Ok(())
    })
}

/// Reads a model previously written as JSON.
///
/// # Safety
/// `model_json` is NUL-terminated; `out` points to writable memory.
#[no_mangle]
pub unsafe extern "C" fn symsem_model_from_json(
    model_json: *const c_char,
    out: *mut *mut SymsemModel,
) -> SymsemStatus {
    guard(|| {
        nonnull(out, "out")?;
        // SAFETY: forwarded caller contract
        let text = unsafe { text(model_json, "model_json") }?;
        let model = InterpretationModel::from_json(text)?;
        // SAFETY: checked non-null above
        unsafe { *out = Box::into_raw(Box::new(SymsemModel { model })) };
        Ok(())
    })
}

/// Serialises a model. The string is freed with `symsem_string_free`.
///
/// # Safety
/// `model` is a live handle; `out` points to writable memory.
#[no_mangle]
pub unsafe extern "C" fn symsem_model_to_json(
    model: *const SymsemModel,
    out: *mut *mut c_char,
) -> SymsemStatus {
    guard(|| {
        nonnull(model, "model")?;
        nonnull(out, "out")?;
        // SAFETY: live handle per the caller contract
        let m = unsafe { &(*model).model };
        out_string(m.to_json(), out)
    })
}

/// Runs a query and renders the answers, one solution per line followed
/// by a `% N solutions` footer.
///
/// # Safety
/// `model` is a live handle, `query` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn symsem_query(
    model: *const SymsemModel,
    query: *const c_char,
    out: *mut *mut c_char,
) -> SymsemStatus {
    guard(|| {
        nonnull(model, "model")?;
        nonnull(out, "out")?;
        // SAFETY: forwarded caller contract
        let q = unsafe { text(query, "query") }?;
        let ast = parse_query(q).map_err(|e| {
            let message = match e.caret(q) {
                Some(caret) => format!("{e}\n{caret}"),
                None => e.to_string(),
            };
            Failure(SymsemStatus::Query, message)
        })?;
        // SAFETY: live handle per the caller contract
        let m = unsafe { &(*model).model };
        out_string(evaluate(&ast, m).render(), out)
    })
}

/// Symmetry statistics of one scope, a [`SymsemScope`] value.
///
/// # Safety
/// `model` is a live handle; `out` points to writable memory.
#[no_mangle]
pub unsafe extern "C" fn symsem_stats(
    model: *const SymsemModel,
    scope: u32,
    out: *mut SymsemStats,
) -> SymsemStatus {
    guard(|| {
        nonnull(model, "model")?;
        nonnull(out, "out")?;
        // SAFETY: live handle per the caller contract
        let m = unsafe { &(*model).model };
        let s = match scope {
            x if x == SymsemScope::Patches as u32 => symmetry_stats(m),
            x if x == SymsemScope::Objects as u32 => symmetrical_objects_stats(m),
            other => {
                return Err(Failure(
                    SymsemStatus::InvalidArgument,
                    format!("unknown scope {other}"),
                ))
            }
        };
        let stats = SymsemStats {
            num_elements: s.num_elements as u64,
            num_symmetric: s.num_symmetric as u64,
            relative_symmetry: s.relative_symmetry,
            mean_divergence: s.mean_divergence.unwrap_or(0.0),
            mean_similarity: s.mean_similarity.unwrap_or(0.0),
            has_mean_divergence: u8::from(s.mean_divergence.is_some()),
            has_mean_similarity: u8::from(s.mean_similarity.is_some()),
        };
        // SAFETY: checked non-null above
        unsafe { *out = stats };
        Ok(())
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn symsem_model_free(model: *mut SymsemModel) {
    if !model.is_null() {
        // SAFETY: handle came from Box::into_raw and is freed once
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn symsem_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: string came from CString::into_raw and is freed once
        drop(unsafe { CString::from_raw(s) });
    }
}
