//! C ABI for the tokfix repair engine.
//!
//! Every fallible function returns a [`TokfixStatus`]; on failure a message is
//! available from [`tokfix_last_error_message`] on the calling thread. Objects
//! are opaque handles released with their matching `*_free` function, and
//! strings returned through out-parameters are released with
//! [`tokfix_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use tokfix::corpus::{ingest, CorpusError, CorpusHandle, IngestOptions};
use tokfix::encoding::token_sequence;
use tokfix::engine::{edit_record, Engine, EngineOptions, RepairReport, Status};
use tokfix::frontend::{self, Ast, FrontendError, Language};
use tokfix::judge::{Judge, Toolchain};
use tokfix::matching::similarity;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokfixStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    SyntaxError = 3,
    EncodingError = 4,
    SchemaError = 5,
    LayoutError = 6,
    EmptyCorpus = 7,
    EmptyInput = 8,
    EnvironmentError = 9,
    Panic = 10,
}

/// Source language selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokfixLanguage {
    C = 0,
    Cpp = 1,
}

/// Outcome of a repair request.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokfixRepairStatus {
    Repaired = 0,
    NoCandidate = 2,
    ParseError = 3,
}

pub struct TokfixAst {
    ast: Ast,
}

pub struct TokfixCorpus {
    handle: CorpusHandle,
}

pub struct TokfixReport {
    report: RepairReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: TokfixStatus, msg: impl Into<String>) -> TokfixStatus {
    set_error(msg);
    status
}

fn frontend_status(e: &FrontendError) -> TokfixStatus {
    match e {
        FrontendError::Syntax { .. } => TokfixStatus::SyntaxError,
        FrontendError::Encoding { .. } => TokfixStatus::EncodingError,
        FrontendError::Schema(_) => TokfixStatus::SchemaError,
    }
}

fn guard(f: impl FnOnce() -> TokfixStatus) -> TokfixStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(TokfixStatus::Panic, "internal panic"),
    }
}

unsafe fn bytes_arg<'a>(p: *const c_char) -> Option<&'a [u8]> {
    if p.is_null() {
        None
    } else {
        // SAFETY: the caller passes a NUL-terminated string.
        Some(unsafe { CStr::from_ptr(p) }.to_bytes())
    }
}

fn language(lang: c_int) -> Option<Language> {
    match lang {
        0 => Some(Language::C),
        1 => Some(Language::Cpp),
        _ => None,
    }
}

unsafe fn put_string(out: *mut *mut c_char, s: &str) -> TokfixStatus {
    match CString::new(s) {
        Ok(c) => {
            // SAFETY: `out` was checked non-null by the caller.
            unsafe { *out = c.into_raw() };
            TokfixStatus::Ok
        }
        Err(_) => fail(TokfixStatus::InvalidArgument, "string contains an interior NUL byte"),
    }
}

/// Message for the last failure on this thread, or NULL. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn tokfix_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses C-subset source text. `language` is a `TokfixLanguage` value.
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tokfix_parse_source(text: *const c_char, language: c_int, out: *mut *mut TokfixAst) -> TokfixStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let Some(bytes) = (unsafe { bytes_arg(text) }) else {
            return fail(TokfixStatus::NullArgument, "text is NULL");
        };
        if out.is_null() {
            return fail(TokfixStatus::NullArgument, "out is NULL");
        }
        let Some(lang) = self::language(language) else {
            return fail(TokfixStatus::InvalidArgument, "unknown language");
        };
        match frontend::parse_bytes(bytes, lang) {
            Ok(ast) => {
                // SAFETY: checked non-null above.
                unsafe { *out = Box::into_raw(Box::new(TokfixAst { ast })) };
                TokfixStatus::Ok
            }
            Err(e) => fail(frontend_status(&e), e.to_string()),
        }
    })
}

/// Imports an XML tree.
///
/// # Safety
/// `xml` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tokfix_import_xml(xml: *const c_char, out: *mut *mut TokfixAst) -> TokfixStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let Some(bytes) = (unsafe { bytes_arg(xml) }) else {
            return fail(TokfixStatus::NullArgument, "xml is NULL");
        };
        if out.is_null() {
            return fail(TokfixStatus::NullArgument, "out is NULL");
        }
        let Ok(text) = std::str::from_utf8(bytes) else {
            return fail(TokfixStatus::EncodingError, "xml is not UTF-8");
        };
        match frontend::import_xml(text) {
            Ok(ast) => {
                // SAFETY: checked non-null above.
                unsafe { *out = Box::into_raw(Box::new(TokfixAst { ast })) };
                TokfixStatus::Ok
            }
            Err(e) => fail(frontend_status(&e), e.to_string()),
        }
    })
}

/// Serialises a tree to XML; free the result with `tokfix_string_free`.
///
/// # Safety
/// `ast` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tokfix_export_xml(ast: *const TokfixAst, out: *mut *mut c_char) -> TokfixStatus {
    guard(|| {
        if ast.is_null() || out.is_null() {
            return fail(TokfixStatus::NullArgument, "NULL argument");
        }
        // SAFETY: live handle per contract.
        let ast = unsafe { &(*ast).ast };
        // SAFETY: `out` checked above.
        unsafe { put_string(out, &frontend::export_xml(ast)) }
    })
}

/// Number of tokens (leaves) in a tree; 0 for NULL.
///
/// # Safety
/// `ast` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tokfix_ast_token_count(ast: *const TokfixAst) -> usize {
    if ast.is_null() {
        return 0;
    }
    // SAFETY: live handle per contract.
    unsafe { token_sequence(&(*ast).ast).len() }
}

/// # Safety
/// `ast` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tokfix_ast_free(ast: *mut TokfixAst) {
    if !ast.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(ast) });
    }
}

/// Token similarity of two trees, in [0, 1] for non-empty input.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tokfix_similarity(a: *const TokfixAst, b: *const TokfixAst, out: *mut f64) -> TokfixStatus {
    guard(|| {
        if a.is_null() || b.is_null() || out.is_null() {
            return fail(TokfixStatus::NullArgument, "NULL argument");
        }
        // SAFETY: live handles per contract.
        let (a, b) = unsafe { (&(*a).ast, &(*b).ast) };
        match similarity(&token_sequence(a), &token_sequence(b)) {
            Ok(s) => {
                // SAFETY: `out` checked above.
                unsafe { *out = s.value() };
                TokfixStatus::Ok
            }
            Err(e) => fail(TokfixStatus::EmptyInput, e.to_string()),
        }
    })
}

/// Opens (and if needed preprocesses) a problem directory.
///
/// # Safety
/// `problem_dir` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tokfix_corpus_open(problem_dir: *const c_char, out: *mut *mut TokfixCorpus) -> TokfixStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let Some(bytes) = (unsafe { bytes_arg(problem_dir) }) else {
            return fail(TokfixStatus::NullArgument, "problem_dir is NULL");
        };
        if out.is_null() {
            return fail(TokfixStatus::NullArgument, "out is NULL");
        }
        let Ok(dir) = std::str::from_utf8(bytes) else {
            return fail(TokfixStatus::EncodingError, "path is not UTF-8");
        };
        match ingest(Path::new(dir), &IngestOptions::default()) {
            Ok(handle) => {
                // SAFETY: checked non-null above.
                unsafe { *out = Box::into_raw(Box::new(TokfixCorpus { handle })) };
                TokfixStatus::Ok
            }
            Err(e @ CorpusError::EmptyCorpus(_)) => fail(TokfixStatus::EmptyCorpus, e.to_string()),
            Err(e @ CorpusError::Layout(_)) => fail(TokfixStatus::LayoutError, e.to_string()),
            Err(e) => fail(TokfixStatus::EnvironmentError, e.to_string()),
        }
    })
}

/// Number of cached correct solutions; 0 for NULL.
///
/// # Safety
/// `corpus` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tokfix_corpus_size(corpus: *const TokfixCorpus) -> usize {
    if corpus.is_null() {
        return 0;
    }
    // SAFETY: live handle per contract.
    unsafe { (*corpus).handle.entries.len() }
}

/// # Safety
/// `corpus` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tokfix_corpus_free(corpus: *mut TokfixCorpus) {
    if !corpus.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(corpus) });
    }
}

/// Repairs `source` against `corpus`. `limit` 0 means the default candidate
/// cap; `jobs` 0 means 8; `minimize` 0 disables minimisation.
///
/// # Safety
/// `corpus` must be a live handle, `source` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tokfix_repair(
    corpus: *const TokfixCorpus,
    source: *const c_char,
    language: c_int,
    limit: usize,
    jobs: usize,
    minimize: c_int,
    out: *mut *mut TokfixReport,
) -> TokfixStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let Some(bytes) = (unsafe { bytes_arg(source) }) else {
            return fail(TokfixStatus::NullArgument, "source is NULL");
        };
        if corpus.is_null() || out.is_null() {
            return fail(TokfixStatus::NullArgument, "NULL argument");
        }
        let Some(lang) = self::language(language) else {
            return fail(TokfixStatus::InvalidArgument, "unknown language");
        };
        // SAFETY: live handle per contract.
        let handle = unsafe { &(*corpus).handle };
        let judge = match Judge::new(Toolchain::from_env(), if jobs == 0 { 8 } else { jobs }) {
            Ok(j) => j,
            Err(e) => return fail(TokfixStatus::EnvironmentError, e.to_string()),
        };
        let options = EngineOptions {
            limit: (limit > 0).then_some(limit),
            minimize: minimize != 0,
            ..EngineOptions::default()
        };
        let engine = Engine::new(handle, &judge, options);
        match engine.repair_bytes("input", bytes, lang) {
            Ok(report) => {
                // SAFETY: checked non-null above.
                unsafe { *out = Box::into_raw(Box::new(TokfixReport { report })) };
                TokfixStatus::Ok
            }
            Err(e) => fail(TokfixStatus::EnvironmentError, e.to_string()),
        }
    })
}

/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tokfix_report_status(report: *const TokfixReport) -> TokfixRepairStatus {
    // SAFETY: live handle per contract.
    match unsafe { &(*report).report }.status {
        Status::Repaired => TokfixRepairStatus::Repaired,
        Status::NoCandidate => TokfixRepairStatus::NoCandidate,
        Status::ParseError => TokfixRepairStatus::ParseError,
    }
}

/// Number of edits in the final repair (0 unless repaired).
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tokfix_report_edit_count(report: *const TokfixReport) -> usize {
    if report.is_null() {
        return 0;
    }
    // SAFETY: live handle per contract.
    unsafe { &(*report).report }.repair.as_ref().map_or(0, |r| r.len())
}

/// Edit list as tab-separated records, one per line.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tokfix_report_edits_tsv(report: *const TokfixReport, out: *mut *mut c_char) -> TokfixStatus {
    guard(|| {
        if report.is_null() || out.is_null() {
            return fail(TokfixStatus::NullArgument, "NULL argument");
        }
        // SAFETY: live handle per contract.
        let r = unsafe { &(*report).report };
        let text: String = r
            .repair
            .iter()
            .flat_map(|rep| rep.edits.iter())
            .map(|e| edit_record(e) + "\n")
            .collect();
        // SAFETY: `out` checked above.
        unsafe { put_string(out, &text) }
    })
}

/// Repaired program text; `*out` is set to NULL when there is none.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tokfix_report_repaired_source(report: *const TokfixReport, out: *mut *mut c_char) -> TokfixStatus {
    guard(|| {
        if report.is_null() || out.is_null() {
            return fail(TokfixStatus::NullArgument, "NULL argument");
        }
        // SAFETY: live handle per contract.
        let r = unsafe { &(*report).report };
        match &r.repaired_source {
            // SAFETY: `out` checked above.
            Some(s) => unsafe { put_string(out, s) },
            None => {
                // SAFETY: `out` checked above.
                unsafe { *out = ptr::null_mut() };
                TokfixStatus::Ok
            }
        }
    })
}

/// Id of the reference solution used; `*out` is NULL when there is none.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tokfix_report_candidate(report: *const TokfixReport, out: *mut *mut c_char) -> TokfixStatus {
    guard(|| {
        if report.is_null() || out.is_null() {
            return fail(TokfixStatus::NullArgument, "NULL argument");
        }
        // SAFETY: live handle per contract.
        let r = unsafe { &(*report).report };
        match &r.candidate_id {
            // SAFETY: `out` checked above.
            Some(s) => unsafe { put_string(out, s) },
            None => {
                // SAFETY: `out` checked above.
                unsafe { *out = ptr::null_mut() };
                TokfixStatus::Ok
            }
        }
    })
}

/// # Safety
/// `report` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tokfix_report_free(report: *mut TokfixReport) {
    if !report.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(report) });
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tokfix_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: the string came from `CString::into_raw`.
        drop(unsafe { CString::from_raw(s) });
    }
}
