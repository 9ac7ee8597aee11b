use std::ffi::{CStr, CString};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use tokfix_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { tokfix_string_free(p) };
    s
}

fn last_error() -> String {
    let p = tokfix_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn parse(src: &str) -> *mut TokfixAst {
    let mut ast = ptr::null_mut();
    let st = unsafe { tokfix_parse_source(c(src).as_ptr(), TokfixLanguage::C as i32, &mut ast) };
    assert_eq!(st, TokfixStatus::Ok);
    ast
}

#[test]
fn parse_export_import_round_trip() {
    let ast = parse("int main(){return 0;}");
    assert_eq!(unsafe { tokfix_ast_token_count(ast) }, 9);
    let mut xml = ptr::null_mut();
    assert_eq!(unsafe { tokfix_export_xml(ast, &mut xml) }, TokfixStatus::Ok);
    let xml = take_string(xml);
    assert!(xml.contains("<translation-unit>"));
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { tokfix_import_xml(c(&xml).as_ptr(), &mut back) }, TokfixStatus::Ok);
    let mut sim = 0.0;
    assert_eq!(unsafe { tokfix_similarity(ast, back, &mut sim) }, TokfixStatus::Ok);
    assert_eq!(sim, 1.0);
    unsafe {
        tokfix_ast_free(ast);
        tokfix_ast_free(back);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut ast = ptr::null_mut();
    let st = unsafe { tokfix_parse_source(c("int main(){int 5x;}").as_ptr(), 0, &mut ast) };
    assert_eq!(st, TokfixStatus::SyntaxError);
    assert!(ast.is_null());
    assert!(last_error().contains("1:"));

    let st = unsafe { tokfix_parse_source(c("int x;").as_ptr(), 7, &mut ast) };
    assert_eq!(st, TokfixStatus::InvalidArgument);

    let st = unsafe { tokfix_import_xml(c("<stmt/>").as_ptr(), &mut ast) };
    assert_eq!(st, TokfixStatus::SchemaError);
    assert!(last_error().contains("stmt"));

    let st = unsafe { tokfix_parse_source(ptr::null(), 0, &mut ast) };
    assert_eq!(st, TokfixStatus::NullArgument);

    let bad = [0xffu8, 0xfe, 0];
    let st = unsafe { tokfix_parse_source(bad.as_ptr().cast(), 0, &mut ast) };
    assert_eq!(st, TokfixStatus::EncodingError);

    let mut corpus = ptr::null_mut();
    let st = unsafe { tokfix_corpus_open(c("/nonexistent/problem").as_ptr(), &mut corpus) };
    assert_eq!(st, TokfixStatus::LayoutError);

    // Freeing NULL is a no-op.
    unsafe {
        tokfix_ast_free(ptr::null_mut());
        tokfix_corpus_free(ptr::null_mut());
        tokfix_report_free(ptr::null_mut());
        tokfix_string_free(ptr::null_mut());
    }
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn reversal_problem() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    for sub in ["tests", "correct"] {
        fs::create_dir(root.join(sub)).unwrap();
    }
    fs::write(root.join("config"), "language=c++\n").unwrap();
    fs::write(root.join("tests/1.in"), "5\n8 6 5 4 1\n").unwrap();
    fs::write(root.join("tests/1.out"), "1 4 5 6 8\n").unwrap();
    fs::write(root.join("tests/2.in"), "3\n1 2 3\n").unwrap();
    fs::write(root.join("tests/2.out"), "3 2 1\n").unwrap();
    fs::copy(fixtures().join("reverse_reference.cpp"), root.join("correct/ref.cpp")).unwrap();
    dir
}

#[test]
fn repair_through_handles() {
    let problem = reversal_problem();
    let mut corpus = ptr::null_mut();
    let dir = c(problem.path().to_str().unwrap());
    assert_eq!(unsafe { tokfix_corpus_open(dir.as_ptr(), &mut corpus) }, TokfixStatus::Ok);
    assert_eq!(unsafe { tokfix_corpus_size(corpus) }, 1);

    let buggy = fs::read_to_string(fixtures().join("reverse_buggy.cpp")).unwrap();
    let mut report = ptr::null_mut();
    let st = unsafe { tokfix_repair(corpus, c(&buggy).as_ptr(), TokfixLanguage::Cpp as i32, 0, 2, 1, &mut report) };
    assert_eq!(st, TokfixStatus::Ok, "{}", last_error());
    assert_eq!(unsafe { tokfix_report_status(report) }, TokfixRepairStatus::Repaired);
    assert_eq!(unsafe { tokfix_report_edit_count(report) }, 2);

    let mut tsv = ptr::null_mut();
    assert_eq!(unsafe { tokfix_report_edits_tsv(report, &mut tsv) }, TokfixStatus::Ok);
    assert_eq!(take_string(tsv), "update\t56\ta\ta - 1\nupdate\t59\t>\t>=\n");

    let mut cand = ptr::null_mut();
    assert_eq!(unsafe { tokfix_report_candidate(report, &mut cand) }, TokfixStatus::Ok);
    assert_eq!(take_string(cand), "ref.cpp");

    let mut src = ptr::null_mut();
    assert_eq!(unsafe { tokfix_report_repaired_source(report, &mut src) }, TokfixStatus::Ok);
    assert!(take_string(src).contains("i = a - 1"));

    let mut report2 = ptr::null_mut();
    let st = unsafe { tokfix_repair(corpus, c("int main({").as_ptr(), 1, 0, 1, 1, &mut report2) };
    assert_eq!(st, TokfixStatus::Ok);
    assert_eq!(unsafe { tokfix_report_status(report2) }, TokfixRepairStatus::ParseError);
    let mut none = ptr::null_mut();
    assert_eq!(unsafe { tokfix_report_repaired_source(report2, &mut none) }, TokfixStatus::Ok);
    assert!(none.is_null());

    unsafe {
        tokfix_report_free(report);
        tokfix_report_free(report2);
        tokfix_corpus_free(corpus);
    }
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/tokfix.h")
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let dir = tempfile::tempdir().unwrap();
    let probe = dir.path().join("probe.c");
    fs::write(
        &probe,
        "#include \"tokfix.h\"\n\
         int main(void) {\n\
           TokfixAst *ast = 0;\n\
           TokfixStatus st = tokfix_parse_source(\"int x;\", TOKFIX_LANGUAGE_C, &ast);\n\
           size_t n = tokfix_ast_token_count(ast);\n\
           tokfix_ast_free(ast);\n\
           return st == TOKFIX_STATUS_OK && n == 3 ? 0 : 1;\n\
         }\n",
    )
    .unwrap();
    let include = header().parent().unwrap().to_path_buf();
    for (cc, extra) in [("gcc", &["-std=c99"][..]), ("g++", &["-x", "c++"][..])] {
        let out = Command::new(cc)
            .args(extra)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
            .arg(&include)
            .arg(&probe)
            .output()
            .expect("compiler available");
        assert!(out.status.success(), "{cc}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn header_declares_every_export() {
    let text = fs::read_to_string(header()).unwrap();
    for name in [
        "tokfix_last_error_message",
        "tokfix_parse_source",
        "tokfix_import_xml",
        "tokfix_export_xml",
        "tokfix_ast_token_count",
        "tokfix_ast_free",
        "tokfix_similarity",
        "tokfix_corpus_open",
        "tokfix_corpus_size",
        "tokfix_corpus_free",
        "tokfix_repair",
        "tokfix_report_status",
        "tokfix_report_edit_count",
        "tokfix_report_edits_tsv",
        "tokfix_report_repaired_source",
        "tokfix_report_candidate",
        "tokfix_report_free",
        "tokfix_string_free",
    ] {
        assert!(text.contains(&format!("{name}(")), "{name} missing from header");
    }
}
