//! On-disk problem corpora: tests, limits, and parse-once cached solutions.
//!
//! Layout of a problem directory:
//!
//! ```text
//! <problem>/config            key=value lines (optional)
//! <problem>/tests/<id>.in     stdin for test <id>
//! <problem>/tests/<id>.out    expected stdout
//! <problem>/correct/*         accepted solutions
//! <problem>/incorrect/*       submissions to repair
//! <problem>/cache/<id>.xml    cached trees, written by ingest
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use log::{debug, warn};
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::encoding::{enhance, EnhancedSequence};
use crate::frontend::{export_xml, import_xml, parse_bytes, Ast, FrontendError, Language};
use crate::judge::{Judge, JudgeError, Limits, TestCase};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("bad corpus layout: {0}")]
    Layout(String),
    #[error("no correct solutions could be cached in {0}")]
    EmptyCorpus(PathBuf),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub id: String,
    pub tests: Vec<TestCase>,
    pub limits: Limits,
    pub language: Language,
    pub candidate_limit: Option<usize>,
}

/// A cached correct solution.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub id: String,
    pub source_path: PathBuf,
    pub ast: Ast,
    pub encoded: EnhancedSequence,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub parsed: usize,
    pub cache_hits: usize,
    /// `(program id, reason)` for every solution that could not be cached.
    pub skipped: Vec<(String, String)>,
}

#[derive(Debug, Clone)]
pub struct CorpusHandle {
    pub root: PathBuf,
    pub problem: Problem,
    /// Sorted by id.
    pub entries: Vec<CorpusEntry>,
    pub stats: IngestStats,
}

impl CorpusHandle {
    pub fn entry(&self, id: &str) -> Option<&CorpusEntry> {
        self.entries
            .binary_search_by(|e| e.id.as_str().cmp(id))
            .ok()
            .map(|k| &self.entries[k])
    }

    pub fn incorrect_dir(&self) -> PathBuf {
        self.root.join("incorrect")
    }
}

#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    /// Leave out solutions whose file name carries this author prefix.
    pub exclude_author: Option<String>,
}

/// Author part of an `<author>__<n>.<ext>` file name.
pub fn author_of(file_name: &str) -> Option<&str> {
    let (author, rest) = file_name.split_once("__")?;
    (!author.is_empty() && !rest.is_empty()).then_some(author)
}

pub fn is_source_file(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("c" | "cpp" | "cc" | "cxx")
    )
}

pub fn language_of(path: &Path) -> Option<Language> {
    match path.extension().and_then(|e| e.to_str())? {
        "c" => Some(Language::C),
        "cpp" | "cc" | "cxx" => Some(Language::Cpp),
        _ => None,
    }
}

/// Source files directly inside `dir`, sorted by file name.
pub fn list_sources(dir: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.is_file() && is_source_file(&path) {
            out.push(path);
        }
    }
    out.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(out)
}

fn file_id(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

struct Config {
    limits: Limits,
    language: Option<Language>,
    candidate_limit: Option<usize>,
}

fn read_config(path: &Path) -> Result<Config, CorpusError> {
    let mut cfg = Config {
        limits: Limits::default(),
        language: None,
        candidate_limit: None,
    };
    if !path.exists() {
        return Ok(cfg);
    }
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |what: &str| CorpusError::Layout(format!("config line {}: {what}", n + 1));
        let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key=value"))?;
        let (key, value) = (key.trim(), value.trim());
        let num = || value.parse::<u64>().map_err(|_| bad("expected a non-negative integer"));
        match key {
            "cpu_seconds" => cfg.limits.cpu_seconds = num()?.max(1),
            "memory_mib" => cfg.limits.memory_bytes = num()? << 20,
            "candidate_limit" => cfg.candidate_limit = Some(num()? as usize),
            "language" => {
                cfg.language = Some(Language::from_name(value).ok_or_else(|| bad("unknown language"))?)
            }
            other => warn!("{}: ignoring unknown config key `{other}`", path.display()),
        }
    }
    Ok(cfg)
}

fn read_tests(dir: &Path) -> Result<Vec<TestCase>, CorpusError> {
    if !dir.is_dir() {
        return Err(CorpusError::Layout(format!("missing tests directory {}", dir.display())));
    }
    let mut ids = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.extension().is_some_and(|e| e == "in") {
            ids.push(path.file_stem().unwrap_or_default().to_string_lossy().into_owned());
        }
    }
    ids.sort();
    if ids.is_empty() {
        return Err(CorpusError::Layout(format!("no tests in {}", dir.display())));
    }
    ids.into_iter()
        .map(|id| {
            let input_path = dir.join(format!("{id}.in"));
            let output_path = dir.join(format!("{id}.out"));
            if !output_path.exists() {
                return Err(CorpusError::Layout(format!("test {id} has no .out file")));
            }
            let input = fs::read(&input_path).map_err(io_err(&input_path))?;
            let expected = fs::read(&output_path).map_err(io_err(&output_path))?;
            Ok(TestCase::new(id, input, expected))
        })
        .collect()
}

/// Reads the problem definition (config and tests) without touching solutions.
pub fn load_problem(problem_dir: &Path) -> Result<Problem, CorpusError> {
    if !problem_dir.is_dir() {
        return Err(CorpusError::Layout(format!("{} is not a directory", problem_dir.display())));
    }
    let cfg = read_config(&problem_dir.join("config"))?;
    let tests = read_tests(&problem_dir.join("tests"))?;
    let language = match cfg.language {
        Some(l) => l,
        None => {
            let correct = problem_dir.join("correct");
            let first = if correct.is_dir() { list_sources(&correct)?.into_iter().next() } else { None };
            first.and_then(|p| language_of(&p)).unwrap_or_default()
        }
    };
    Ok(Problem {
        id: file_id(problem_dir),
        tests,
        limits: cfg.limits,
        language,
        candidate_limit: cfg.candidate_limit,
    })
}

fn hash_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

const HASH_TAG: &str = "<!-- source-sha256:";

fn cached_hash(xml: &str) -> Option<&str> {
    let start = xml.find(HASH_TAG)? + HASH_TAG.len();
    let rest = &xml[start..];
    Some(rest[..rest.find("-->")?].trim())
}

enum Loaded {
    Parsed(CorpusEntry),
    Cached(CorpusEntry),
    Skipped(String, String),
}

fn load_entry(path: &Path, cache_dir: &Path) -> Result<Loaded, CorpusError> {
    let id = file_id(path);
    let bytes = fs::read(path).map_err(io_err(path))?;
    let hash = hash_hex(&bytes);
    let cache_path = cache_dir.join(format!("{id}.xml"));
    let entry = |ast: Ast| {
        let ast = ast.with_source_id(id.clone());
        CorpusEntry {
            id: id.clone(),
            source_path: path.to_path_buf(),
            encoded: enhance(&ast),
            ast,
        }
    };
    if let Ok(xml) = fs::read_to_string(&cache_path) {
        if cached_hash(&xml) == Some(hash.as_str()) {
            match import_xml(&xml) {
                Ok(ast) => return Ok(Loaded::Cached(entry(ast))),
                Err(e) => debug!("{}: stale cache ({e}), reparsing", cache_path.display()),
            }
        }
    }
    let lang = language_of(path).unwrap_or_default();
    let ast = match parse_bytes(&bytes, lang) {
        Ok(ast) => ast,
        Err(e) => return Ok(Loaded::Skipped(id, e.to_string())),
    };
    let xml = export_xml(&ast);
    let (decl, body) = xml.split_once('\n').unwrap_or(("", &xml));
    let text = format!("{decl}\n{HASH_TAG} {hash} -->\n{body}");
    fs::write(&cache_path, text).map_err(io_err(&cache_path))?;
    Ok(Loaded::Parsed(entry(ast)))
}

/// Parses every correct solution once, caching trees as XML next to them.
pub fn ingest(problem_dir: &Path, options: &IngestOptions) -> Result<CorpusHandle, CorpusError> {
    let problem = load_problem(problem_dir)?;
    let correct = problem_dir.join("correct");
    if !correct.is_dir() {
        return Err(CorpusError::Layout(format!("missing {}", correct.display())));
    }
    let cache_dir = problem_dir.join("cache");
    fs::create_dir_all(&cache_dir).map_err(io_err(&cache_dir))?;
    let sources: Vec<PathBuf> = list_sources(&correct)?
        .into_iter()
        .filter(|p| match &options.exclude_author {
            Some(a) => author_of(&file_id(p)) != Some(a.as_str()),
            None => true,
        })
        .collect();
    let loaded: Vec<Loaded> = sources
        .par_iter()
        .map(|p| load_entry(p, &cache_dir))
        .collect::<Result<_, _>>()?;
    let mut stats = IngestStats::default();
    let mut entries = Vec::with_capacity(loaded.len());
    for l in loaded {
        match l {
            Loaded::Parsed(e) => {
                stats.parsed += 1;
                entries.push(e);
            }
            Loaded::Cached(e) => {
                stats.cache_hits += 1;
                entries.push(e);
            }
            Loaded::Skipped(id, why) => {
                warn!("skipping {id}: {why}");
                stats.skipped.push((id, why));
            }
        }
    }
    if entries.is_empty() {
        return Err(CorpusError::EmptyCorpus(problem_dir.to_path_buf()));
    }
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(CorpusHandle {
        root: problem_dir.to_path_buf(),
        problem,
        entries,
        stats,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub checked: usize,
    /// `(program id, verdict summary)` for solutions that fail their tests.
    pub flagged: Vec<(String, String)>,
}

/// Re-judges every cached correct solution.
pub fn verify_corpus(handle: &CorpusHandle, judge: &Judge) -> Result<VerifyReport, JudgeError> {
    let results: Vec<(String, String)> = handle
        .entries
        .par_iter()
        .map(|e| {
            let source = fs::read_to_string(&e.source_path)
                .map_err(|err| JudgeError::SandboxFailure(format!("{}: {err}", e.source_path.display())))?;
            let lang = language_of(&e.source_path).unwrap_or(handle.problem.language);
            let v = judge.judge(&source, lang, &handle.problem.tests, handle.problem.limits)?;
            Ok((e.id.clone(), v.summary().to_string()))
        })
        .collect::<Result<_, JudgeError>>()?;
    Ok(VerifyReport {
        checked: results.len(),
        flagged: results.into_iter().filter(|(_, s)| s != "AC").collect(),
    })
}

/// Cached XML for `id` re-imported, for coherence checks.
pub fn read_cached(handle: &CorpusHandle, id: &str) -> Result<Ast, FrontendError> {
    let path = handle.root.join("cache").join(format!("{id}.xml"));
    let xml = fs::read_to_string(&path).map_err(|e| FrontendError::Schema(format!("{}: {e}", path.display())))?;
    import_xml(&xml)
}
