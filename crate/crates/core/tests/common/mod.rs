//! Shared fixtures for the integration tests.
#![allow(dead_code)]

pub mod synth;

use std::fs;
use std::path::{Path, PathBuf};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    fs::read_to_string(fixture(name)).unwrap()
}

/// Test cases for the array reversal problem, starting with the sample.
pub fn reversal_tests() -> Vec<(&'static str, &'static str)> {
    vec![
        ("5\n8 6 5 4 1\n", "1 4 5 6 8\n"),
        ("2\n3 9\n", "9 3\n"),
        ("3\n1 2 3\n", "3 2 1\n"),
        ("4\n10 -2 0 5\n", "5 0 -2 10\n"),
        ("6\n4 4 1 7 7 2\n", "2 7 7 1 4 4\n"),
    ]
}

pub fn write_problem(root: &Path, config: &str, tests: &[(impl AsRef<str>, impl AsRef<str>)]) {
    for sub in ["tests", "correct", "incorrect"] {
        fs::create_dir_all(root.join(sub)).unwrap();
    }
    fs::write(root.join("config"), config).unwrap();
    for (k, (input, output)) in tests.iter().enumerate() {
        fs::write(root.join(format!("tests/{}.in", k + 1)), input.as_ref()).unwrap();
        fs::write(root.join(format!("tests/{}.out", k + 1)), output.as_ref()).unwrap();
    }
}

/// Reversal problem with the reference solution in `correct/` and the buggy
/// submission in `incorrect/`.
pub fn reversal_problem() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    write_problem(dir.path(), "language=c++\n", &reversal_tests());
    fs::copy(fixture("reverse_reference.cpp"), dir.path().join("correct/reverse_reference.cpp")).unwrap();
    fs::copy(fixture("reverse_buggy.cpp"), dir.path().join("incorrect/reverse_buggy.cpp")).unwrap();
    dir
}
