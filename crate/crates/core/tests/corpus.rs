mod common;

use std::fs;

use tokfix::corpus::{author_of, ingest, load_problem, read_cached, CorpusError, IngestOptions};
use tokfix::encoding::token_sequence;
use tokfix::frontend::{parse_source, Language};

fn snapshot(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn cached_trees_match_fresh_parses_and_ingest_is_idempotent() {
    let dir = common::reversal_problem();
    fs::write(dir.path().join("correct/alice__1.c"), "int main() { return 0; }\n").unwrap();
    fs::write(dir.path().join("correct/broken.c"), "int main( {\n").unwrap();
    let first = ingest(dir.path(), &IngestOptions::default()).unwrap();
    assert_eq!(first.stats.parsed, 2);
    assert_eq!(first.stats.skipped.len(), 1);
    let ids: Vec<&str> = first.entries.iter().map(|e| e.id.as_str()).collect();
    assert_eq!(ids, ["alice__1.c", "reverse_reference.cpp"]);
    for e in &first.entries {
        let fresh = parse_source(&fs::read_to_string(&e.source_path).unwrap(), Language::Cpp).unwrap();
        let cached = read_cached(&first, &e.id).unwrap();
        assert_eq!(token_sequence(&cached).tokens, token_sequence(&fresh).tokens);
    }
    let before = snapshot(&dir.path().join("cache"));
    let second = ingest(dir.path(), &IngestOptions::default()).unwrap();
    assert_eq!((second.stats.parsed, second.stats.cache_hits), (0, 2));
    assert_eq!(snapshot(&dir.path().join("cache")), before);
    for (a, b) in first.entries.iter().zip(&second.entries) {
        assert!(a.ast.structurally_eq(&b.ast));
        assert_eq!(a.encoded, b.encoded);
    }
}

#[test]
fn edited_source_invalidates_its_cache_entry() {
    let dir = common::reversal_problem();
    ingest(dir.path(), &IngestOptions::default()).unwrap();
    let path = dir.path().join("correct/reverse_reference.cpp");
    let mut src = fs::read_to_string(&path).unwrap();
    src.push_str("int unused;\n");
    fs::write(&path, src).unwrap();
    let again = ingest(dir.path(), &IngestOptions::default()).unwrap();
    assert_eq!(again.stats.parsed, 1);
    assert_eq!(token_sequence(&again.entries[0].ast).tokens.last().unwrap().lexeme, ";");
}

#[test]
fn author_filter() {
    assert_eq!(author_of("bob__3.c"), Some("bob"));
    assert_eq!(author_of("plain.c"), None);
    let dir = common::reversal_problem();
    fs::write(dir.path().join("correct/bob__1.c"), "int main() { return 0; }\n").unwrap();
    let h = ingest(dir.path(), &IngestOptions { exclude_author: Some("bob".into()) }).unwrap();
    assert_eq!(h.entries.len(), 1);
}

#[test]
fn layout_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(load_problem(dir.path()), Err(CorpusError::Layout(_))));
    common::write_problem(dir.path(), "cpu_seconds=3\nmemory_mib=64\nfavourite_colour=blue\n", &[("1\n", "1\n")]);
    let p = load_problem(dir.path()).unwrap();
    assert_eq!(p.limits.cpu_seconds, 3);
    assert_eq!(p.limits.memory_bytes, 64 << 20);
    assert!(matches!(ingest(dir.path(), &IngestOptions::default()), Err(CorpusError::EmptyCorpus(_))));
    fs::write(dir.path().join("config"), "cpu_seconds=lots\n").unwrap();
    assert!(matches!(load_problem(dir.path()), Err(CorpusError::Layout(_))));
}
