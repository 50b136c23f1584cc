//! C ABI for the phrasecat engine.
//!
//! Conventions:
//!
//! - Every fallible function returns a [`PcStatus`]; on anything but
//!   `PC_STATUS_OK` a message is available from [`pc_last_error`] on the same
//!   thread until the next call.
//! - Strings in are NUL-terminated UTF-8. Strings out are allocated here and
//!   must be released with [`pc_string_free`].
//! - Structured results (reports, hits, selections) are JSON strings.
//! - A `PcCatalogue` is immutable after creation and may be shared between
//!   threads; release it with [`pc_catalogue_free`].
//! - Panics never cross the boundary; they surface as `PC_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::OnceLock;

use phrasecat::qa::{enumerate_count, generate_random, GenerationSpec, QaError};
use phrasecat::render::RenderError;
use phrasecat::search::{build_index, search, PhraseIndex};
use phrasecat::{parse_catalogue, render_sentence, validate_catalogue, Catalogue, Selection};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8 or a result contained NUL.
    InvalidUtf8 = 2,
    /// The catalogue document or a JSON argument did not parse.
    ParseError = 3,
    /// The catalogue has validation errors.
    ValidationFailed = 4,
    /// The selection could not be rendered (incomplete, stale, ...).
    RenderError = 5,
    /// Unknown phrase or language.
    NotFound = 6,
    /// Enumeration or generation bound exceeded.
    LimitExceeded = 7,
    IoError = 8,
    /// Internal error; the call had no effect.
    Panic = 99,
}

/// Opaque catalogue handle.
pub struct PcCatalogue {
    catalogue: Catalogue,
    index: OnceLock<PhraseIndex>,
}

impl PcCatalogue {
    fn index(&self) -> &PhraseIndex {
        self.index.get_or_init(|| build_index(&self.catalogue))
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(PcStatus, String);

type FfiResult<T> = Result<T, Failure>;

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', "\u{FFFD}")).expect("NULs replaced");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Run `body`, translating errors and panics into a status.
fn guard(body: impl FnOnce() -> FfiResult<()>) -> PcStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => PcStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_owned());
            set_last_error(&format!("internal error: {message}"));
            PcStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure(PcStatus::NullArgument, format!("{name} is NULL")));
    }
    // SAFETY: caller guarantees a NUL-terminated string that outlives the call.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|e| Failure(PcStatus::InvalidUtf8, format!("{name}: {e}")))
}

unsafe fn handle<'a>(p: *const PcCatalogue) -> FfiResult<&'a PcCatalogue> {
    // SAFETY: a non-NULL handle comes from pc_catalogue_parse/load and is not yet freed.
    unsafe { p.as_ref() }.ok_or_else(|| Failure(PcStatus::NullArgument, "catalogue is NULL".into()))
}

fn out_ptr<T>(p: *mut T, name: &str) -> FfiResult<()> {
    if p.is_null() {
        Err(Failure(PcStatus::NullArgument, format!("{name} is NULL")))
    } else {
        Ok(())
    }
}

fn to_c(s: String) -> FfiResult<*mut c_char> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(PcStatus::InvalidUtf8, "result contains a NUL byte".into()))
}

fn new_handle(bytes: &[u8], out: *mut *mut PcCatalogue) -> FfiResult<()> {
    let catalogue = parse_catalogue(bytes).map_err(|e| Failure(PcStatus::ParseError, e.to_string()))?;
    let boxed = Box::new(PcCatalogue {
        catalogue,
        index: OnceLock::new(),
    });
    // SAFETY: checked non-NULL by the caller of this helper.
    unsafe { *out = Box::into_raw(boxed) };
    Ok(())
}

fn render_failure(e: RenderError) -> Failure {
    let status = match e {
        RenderError::UnknownPhrase(_) | RenderError::UnknownLanguage(_) => PcStatus::NotFound,
        _ => PcStatus::RenderError,
    };
    Failure(status, format!("{}: {e}", e.code()))
}

fn qa_failure(e: QaError) -> Failure {
    let status = match e {
        QaError::UnknownPhrase(_) => PcStatus::NotFound,
        QaError::LimitExceeded { .. } => PcStatus::LimitExceeded,
        QaError::Catalogue(_) => PcStatus::ValidationFailed,
    };
    Failure(status, format!("{}: {e}", e.code()))
}

/// Parse a catalogue document of `len` bytes. On success `*out` receives a
/// new handle. The catalogue is parsed but not validated.
///
/// # Safety
/// `bytes` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_catalogue_parse(bytes: *const u8, len: usize, out: *mut *mut PcCatalogue) -> PcStatus {
    guard(|| {
        out_ptr(out, "out")?;
        if bytes.is_null() {
            return Err(Failure(PcStatus::NullArgument, "bytes is NULL".into()));
        }
        // SAFETY: caller guarantees `len` readable bytes.
        let slice = unsafe { std::slice::from_raw_parts(bytes, len) };
        new_handle(slice, out)
    })
}

/// Read and parse the catalogue file at `path`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pc_catalogue_load(path: *const c_char, out: *mut *mut PcCatalogue) -> PcStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let path = unsafe { str_arg(path, "path") }?;
        let bytes = std::fs::read(Path::new(path)).map_err(|e| Failure(PcStatus::IoError, format!("{path}: {e}")))?;
        new_handle(&bytes, out)
    })
}

/// Release a handle. NULL is ignored.
///
/// # Safety
/// `cat` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pc_catalogue_free(cat: *mut PcCatalogue) {
    if !cat.is_null() {
        // SAFETY: produced by Box::into_raw in new_handle.
        drop(unsafe { Box::from_raw(cat) });
    }
}

/// Validate the catalogue. `*report_json` receives the report
/// (`{"errors": [...], "warnings": [...]}`); `error_count` may be NULL.
/// Returns `PC_STATUS_VALIDATION_FAILED` when there are errors, the report is
/// still produced.
///
/// # Safety
/// Pointers must be valid as documented.
#[no_mangle]
pub unsafe extern "C" fn pc_catalogue_validate(
    cat: *const PcCatalogue,
    report_json: *mut *mut c_char,
    error_count: *mut usize,
) -> PcStatus {
    guard(|| {
        let cat = unsafe { handle(cat) }?;
        out_ptr(report_json, "report_json")?;
        let report = validate_catalogue(&cat.catalogue);
        let json = serde_json::to_string(&report).expect("reports serialize");
        unsafe { *report_json = to_c(json)? };
        if !error_count.is_null() {
            unsafe { *error_count = report.errors.len() };
        }
        if report.is_ok() {
            Ok(())
        } else {
            Err(Failure(
                PcStatus::ValidationFailed,
                format!("{} validation error(s)", report.errors.len()),
            ))
        }
    })
}

/// Render a selection (JSON: `{"phrase": ..., "choices": {...}}`) in `lang`.
///
/// # Safety
/// Pointers must be valid as documented.
#[no_mangle]
pub unsafe extern "C" fn pc_render_sentence(
    cat: *const PcCatalogue,
    selection_json: *const c_char,
    lang: *const c_char,
    out: *mut *mut c_char,
) -> PcStatus {
    guard(|| {
        let cat = unsafe { handle(cat) }?;
        let json = unsafe { str_arg(selection_json, "selection_json") }?;
        let lang = unsafe { str_arg(lang, "lang") }?;
        out_ptr(out, "out")?;
        let selection: Selection =
            serde_json::from_str(json).map_err(|e| Failure(PcStatus::ParseError, format!("selection: {e}")))?;
        let text = render_sentence(&cat.catalogue, &selection, lang).map_err(render_failure)?;
        unsafe { *out = to_c(text)? };
        Ok(())
    })
}

/// Search phrases; `*hits_json` receives a JSON array of hits, best first.
///
/// # Safety
/// Pointers must be valid as documented.
#[no_mangle]
pub unsafe extern "C" fn pc_search(
    cat: *const PcCatalogue,
    query: *const c_char,
    limit: usize,
    hits_json: *mut *mut c_char,
) -> PcStatus {
    guard(|| {
        let cat = unsafe { handle(cat) }?;
        let query = unsafe { str_arg(query, "query") }?;
        out_ptr(hits_json, "hits_json")?;
        let hits = search(cat.index(), query, limit);
        unsafe { *hits_json = to_c(serde_json::to_string(&hits).expect("hits serialize"))? };
        Ok(())
    })
}

/// Number of complete selections of `phrase`, as a decimal string (it may
/// exceed 64 bits).
///
/// # Safety
/// Pointers must be valid as documented.
#[no_mangle]
pub unsafe extern "C" fn pc_enumerate_count(
    cat: *const PcCatalogue,
    phrase: *const c_char,
    decimal: *mut *mut c_char,
) -> PcStatus {
    guard(|| {
        let cat = unsafe { handle(cat) }?;
        let phrase = unsafe { str_arg(phrase, "phrase") }?;
        out_ptr(decimal, "decimal")?;
        let count = enumerate_count(&cat.catalogue, phrase).map_err(qa_failure)?;
        unsafe { *decimal = to_c(count.to_string())? };
        Ok(())
    })
}

/// `count` seeded random selections of `phrase` as a JSON array.
///
/// # Safety
/// Pointers must be valid as documented.
#[no_mangle]
pub unsafe extern "C" fn pc_generate_random(
    cat: *const PcCatalogue,
    phrase: *const c_char,
    seed: u64,
    count: usize,
    selections_json: *mut *mut c_char,
) -> PcStatus {
    guard(|| {
        let cat = unsafe { handle(cat) }?;
        let phrase = unsafe { str_arg(phrase, "phrase") }?;
        out_ptr(selections_json, "selections_json")?;
        let spec = GenerationSpec {
            phrase: phrase.into(),
            seed,
            count,
        };
        let selections = generate_random(&cat.catalogue, &spec).map_err(qa_failure)?;
        let json = serde_json::to_string(&selections).expect("selections serialize");
        unsafe { *selections_json = to_c(json)? };
        Ok(())
    })
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pc_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: produced by CString::into_raw in to_c.
        drop(unsafe { CString::from_raw(s) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{"schema_version": 1, "languages": ["en"], "source": "en",
  "lists": {"only": {"depth": 0, "options": ["test"], "texts": {"en": ["test."]}}},
  "phrases": {"p1": {"number": 1, "segments": ["only"], "layouts": {"en": "1"}}}}"#;

    fn last_error() -> String {
        let p = pc_last_error();
        assert!(!p.is_null());
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }

    #[test]
    fn parse_render_free() {
        let mut cat = ptr::null_mut();
        assert_eq!(
            unsafe { pc_catalogue_parse(DOC.as_ptr(), DOC.len(), &mut cat) },
            PcStatus::Ok
        );
        assert!(pc_last_error().is_null());
        let sel = CString::new(r#"{"phrase": "p1", "choices": {"1": {"option": "test"}}}"#).unwrap();
        let lang = CString::new("en").unwrap();
        let mut text = ptr::null_mut();
        assert_eq!(
            unsafe { pc_render_sentence(cat, sel.as_ptr(), lang.as_ptr(), &mut text) },
            PcStatus::Ok
        );
        assert_eq!(unsafe { CStr::from_ptr(text) }.to_str().unwrap(), "Test.");
        unsafe {
            pc_string_free(text);
            pc_catalogue_free(cat);
        }
    }

    #[test]
    fn errors_set_last_error() {
        let bad = b"{ nope";
        let mut cat = ptr::null_mut();
        assert_eq!(
            unsafe { pc_catalogue_parse(bad.as_ptr(), bad.len(), &mut cat) },
            PcStatus::ParseError
        );
        assert!(cat.is_null());
        assert!(last_error().contains("line 1"));
        assert_eq!(
            unsafe { pc_catalogue_parse(ptr::null(), 0, &mut cat) },
            PcStatus::NullArgument
        );
        let mut out = ptr::null_mut();
        assert_eq!(
            unsafe { pc_render_sentence(ptr::null(), ptr::null(), ptr::null(), &mut out) },
            PcStatus::NullArgument
        );
        assert_eq!(last_error(), "catalogue is NULL");
    }
}
