use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use phrasecat_ffi::*;

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn fixture() -> CString {
    let path = manifest_dir().join("../core/tests/fixtures/avalanche.json");
    CString::new(path.to_str().unwrap()).unwrap()
}

unsafe fn take(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { pc_string_free(p) };
    s
}

struct Handle(*mut PcCatalogue);

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { pc_catalogue_free(self.0) }
    }
}

fn load() -> Handle {
    let mut cat = ptr::null_mut();
    assert_eq!(unsafe { pc_catalogue_load(fixture().as_ptr(), &mut cat) }, PcStatus::Ok);
    Handle(cat)
}

#[test]
fn header_is_generated_and_compiles() {
    let header = manifest_dir().join("include/phrasecat.h");
    let text = std::fs::read_to_string(&header).expect("header written by the build script");
    for name in [
        "typedef struct PcCatalogue PcCatalogue;",
        "PC_STATUS_OK = 0",
        "pc_catalogue_parse",
        "pc_catalogue_load",
        "pc_catalogue_free",
        "pc_catalogue_validate",
        "pc_render_sentence",
        "pc_search",
        "pc_enumerate_count",
        "pc_generate_random",
        "pc_last_error",
        "pc_string_free",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }

    let dir = tempfile::tempdir().unwrap();
    let source = dir.path().join("use.c");
    std::fs::write(
        &source,
        r#"#include "phrasecat.h"
int use(const char *path) {
    PcCatalogue *cat = NULL;
    char *out = NULL;
    size_t errors = 0;
    PcStatus s = pc_catalogue_load(path, &cat);
    if (s != PC_STATUS_OK) { return (int)s; }
    s = pc_catalogue_validate(cat, &out, &errors);
    pc_string_free(out);
    s = pc_render_sentence(cat, "{}", "de", &out);
    if (s != PC_STATUS_OK) { const char *msg = pc_last_error(); (void)msg; }
    s = pc_search(cat, "Lawinen", (size_t)10, &out);
    s = pc_enumerate_count(cat, "p22", &out);
    s = pc_generate_random(cat, "p22", (uint64_t)1, (size_t)3, &out);
    pc_catalogue_free(cat);
    return (int)s;
}
"#,
    )
    .unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(manifest_dir().join("include"))
        .arg(&source)
        .status();
    match status {
        Ok(status) => assert!(status.success(), "C compiler rejected the header"),
        Err(e) => panic!("no C compiler available: {e}"),
    }
}

#[test]
fn render_matches_library() {
    let cat = load();
    let selection = r#"{"phrase": "p22", "choices": {"1": {"option": "bonding"}, "2": {"option": "of"},
        "3": {"option": "the"}, "4": {"option": "drifts"}, "5": {"option": "in_progress"}}}"#;
    let selection = CString::new(selection).unwrap();
    let lang = CString::new("it").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { pc_render_sentence(cat.0, selection.as_ptr(), lang.as_ptr(), &mut out) },
        PcStatus::Ok
    );
    assert_eq!(
        unsafe { take(out) },
        "Il legame degli accumuli di neve ventata è in corso."
    );

    let incomplete = CString::new(r#"{"phrase": "p22", "choices": {}}"#).unwrap();
    assert_eq!(
        unsafe { pc_render_sentence(cat.0, incomplete.as_ptr(), lang.as_ptr(), &mut out) },
        PcStatus::RenderError
    );
    let message = unsafe { CStr::from_ptr(pc_last_error()) }.to_str().unwrap().to_owned();
    assert!(message.starts_with("INCOMPLETE_SELECTION"), "{message}");

    let xx = CString::new("xx").unwrap();
    let complete = CString::new(r#"{"phrase": "p99999", "choices": {}}"#).unwrap();
    assert_eq!(
        unsafe { pc_render_sentence(cat.0, complete.as_ptr(), xx.as_ptr(), &mut out) },
        PcStatus::NotFound
    );
}

#[test]
fn validate_search_count_generate() {
    let cat = load();
    let mut out = ptr::null_mut();
    let mut errors = usize::MAX;
    assert_eq!(
        unsafe { pc_catalogue_validate(cat.0, &mut out, &mut errors) },
        PcStatus::Ok
    );
    assert_eq!(errors, 0);
    let report: serde_json::Value = serde_json::from_str(&unsafe { take(out) }).unwrap();
    assert_eq!(report["errors"], serde_json::json!([]));

    let query = CString::new("Grashänge").unwrap();
    assert_eq!(unsafe { pc_search(cat.0, query.as_ptr(), 5, &mut out) }, PcStatus::Ok);
    let hits: serde_json::Value = serde_json::from_str(&unsafe { take(out) }).unwrap();
    assert_eq!(hits[0]["phrase"], "p80");

    let phrase = CString::new("p22").unwrap();
    assert_eq!(
        unsafe { pc_enumerate_count(cat.0, phrase.as_ptr(), &mut out) },
        PcStatus::Ok
    );
    let count: u64 = unsafe { take(out) }.parse().unwrap();
    assert!(count > 0);

    assert_eq!(
        unsafe { pc_generate_random(cat.0, phrase.as_ptr(), 7, 4, &mut out) },
        PcStatus::Ok
    );
    let first = unsafe { take(out) };
    assert_eq!(
        unsafe { pc_generate_random(cat.0, phrase.as_ptr(), 7, 4, &mut out) },
        PcStatus::Ok
    );
    assert_eq!(unsafe { take(out) }, first, "same seed, same selections");
    let selections: Vec<serde_json::Value> = serde_json::from_str(&first).unwrap();
    assert_eq!(selections.len(), 4);

    let unknown = CString::new("nope").unwrap();
    assert_eq!(
        unsafe { pc_enumerate_count(cat.0, unknown.as_ptr(), &mut out) },
        PcStatus::NotFound
    );
}

#[test]
fn invalid_catalogue_reports_errors() {
    let doc = br#"{"schema_version": 1, "languages": ["de", "fr"], "source": "de",
  "lists": {"a": {"depth": 0, "options": ["x"], "texts": {"de": ["X."]}}},
  "phrases": {"p": {"number": 1, "segments": ["a"], "layouts": {"de": "1", "fr": "1"}}}}"#;
    let mut cat = ptr::null_mut();
    assert_eq!(
        unsafe { pc_catalogue_parse(doc.as_ptr(), doc.len(), &mut cat) },
        PcStatus::Ok
    );
    let cat = Handle(cat);
    let mut out = ptr::null_mut();
    let mut errors = 0;
    assert_eq!(
        unsafe { pc_catalogue_validate(cat.0, &mut out, &mut errors) },
        PcStatus::ValidationFailed
    );
    assert!(errors >= 1);
    assert!(unsafe { take(out) }.contains("MISSING_LANGUAGE_TEXT"));
}

#[test]
fn handle_is_shareable_across_threads() {
    let cat = load();
    let addr = cat.0 as usize;
    let results: Vec<String> = std::thread::scope(|s| {
        (0..4)
            .map(|_| {
                s.spawn(move || {
                    let query = CString::new("Triebschnee").unwrap();
                    let mut out = ptr::null_mut();
                    let status = unsafe { pc_search(addr as *const PcCatalogue, query.as_ptr(), 3, &mut out) };
                    assert_eq!(status, PcStatus::Ok);
                    unsafe { take(out) }
                })
            })
            .collect::<Vec<_>>()
            .into_iter()
            .map(|h| h.join().unwrap())
            .collect()
    });
    assert!(results.windows(2).all(|w| w[0] == w[1]));
}
