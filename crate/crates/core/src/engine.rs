//! The end-to-end repair pipeline and its report formats.

use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use log::{debug, info};
use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{author_of, language_of, list_sources, CorpusError, CorpusHandle};
use crate::encoding::{enhance, token_sequence, EnhancedSequence, TokenSequence};
use crate::frontend::lexer::tokenize;
use crate::frontend::{parse_bytes, Ast, Language};
use crate::judge::{Judge, JudgeError, Limits, TestCase};
use crate::matching::{best_alignment, retrieve_candidates, MatchError, Similarity};
use crate::normalize::{infer_identifier_map, transform, MapThresholds};
use crate::repair::{
    apply_edits, extract_edits, join_lexemes, minimize, refine_edits, render, select_candidate, Edit, EditKind,
    Oracle, Repair, Trial,
};

pub const DEFAULT_CANDIDATE_LIMIT: usize = 100;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Judge(#[from] JudgeError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineOptions {
    /// Candidate cap; falls back to the problem config, then 100.
    pub limit: Option<usize>,
    pub minimize: bool,
    pub thresholds: MapThresholds,
    /// Skip reference solutions written by the same author as the submission.
    pub exclude_same_author: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            limit: None,
            minimize: true,
            thresholds: MapThresholds::default(),
            exclude_same_author: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Repaired,
    NoCandidate,
    ParseError,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Repaired => "repaired",
            Status::NoCandidate => "no_candidate",
            Status::ParseError => "parse_error",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Repaired => 0,
            Status::NoCandidate => 2,
            Status::ParseError => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Timings {
    pub parse: Duration,
    pub retrieve: Duration,
    pub candidates: Duration,
    pub minimize: Duration,
    pub total: Duration,
}

#[derive(Debug, Clone)]
pub struct RepairReport {
    pub program_id: String,
    pub status: Status,
    /// Final (possibly minimised) repair when repaired.
    pub repair: Option<Repair>,
    /// The selected repair before minimisation.
    pub selected: Option<Repair>,
    pub candidate_id: Option<String>,
    pub similarity: Option<Similarity>,
    pub validated_candidates: usize,
    pub trials: Vec<Trial>,
    pub repaired_source: Option<String>,
    /// Source line of each token of the submission.
    pub token_lines: Vec<usize>,
    pub message: Option<String>,
    pub timings: Timings,
}

impl RepairReport {
    fn new(program_id: &str, status: Status) -> Self {
        RepairReport {
            program_id: program_id.to_string(),
            status,
            repair: None,
            selected: None,
            candidate_id: None,
            similarity: None,
            validated_candidates: 0,
            trials: Vec::new(),
            repaired_source: None,
            token_lines: Vec::new(),
            message: None,
            timings: Timings::default(),
        }
    }
}

/// Judge-backed oracle for one problem.
pub struct TestOracle<'a> {
    pub judge: &'a Judge,
    pub tests: &'a [TestCase],
    pub limits: Limits,
    pub language: Language,
}

impl Oracle for TestOracle<'_> {
    type Error = JudgeError;

    fn passes(&self, tokens: &TokenSequence) -> Result<bool, JudgeError> {
        self.judge
            .passes_all(&render(tokens), self.language, self.tests, self.limits)
    }
}

pub struct Engine<'a> {
    pub corpus: &'a CorpusHandle,
    pub judge: &'a Judge,
    pub options: EngineOptions,
}

struct Candidate {
    rank: usize,
    repair: Repair,
    similarity: Similarity,
}

impl<'a> Engine<'a> {
    pub fn new(corpus: &'a CorpusHandle, judge: &'a Judge, options: EngineOptions) -> Self {
        Engine { corpus, judge, options }
    }

    fn oracle(&self, language: Language) -> TestOracle<'_> {
        TestOracle {
            judge: self.judge,
            tests: &self.corpus.problem.tests,
            limits: self.corpus.problem.limits,
            language,
        }
    }

    pub fn candidate_limit(&self) -> usize {
        self.options
            .limit
            .or(self.corpus.problem.candidate_limit)
            .unwrap_or(DEFAULT_CANDIDATE_LIMIT)
    }

    pub fn repair_file(&self, path: &Path) -> Result<RepairReport, EngineError> {
        let bytes = std::fs::read(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let id = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let lang = language_of(path).unwrap_or(self.corpus.problem.language);
        self.repair_bytes(&id, &bytes, lang)
    }

    pub fn repair_bytes(&self, program_id: &str, bytes: &[u8], lang: Language) -> Result<RepairReport, EngineError> {
        let start = Instant::now();
        let mut report = RepairReport::new(program_id, Status::Repaired);
        let ast = match parse_bytes(bytes, lang) {
            Ok(ast) => ast.with_source_id(program_id),
            Err(e) => {
                report.status = Status::ParseError;
                report.message = Some(e.to_string());
                report.timings.total = start.elapsed();
                return Ok(report);
            }
        };
        // Valid UTF-8 is guaranteed once parsing succeeded.
        let text = String::from_utf8_lossy(bytes);
        report.token_lines = tokenize(&text)
            .map(|t| t.into_iter().map(|l| l.line).collect())
            .unwrap_or_default();
        report.timings.parse = start.elapsed();
        let oracle = self.oracle(lang);
        let problem = &self.corpus.problem;
        if self.judge.passes_all(&text, lang, &problem.tests, problem.limits)? {
            report.repair = Some(Repair::default());
            report.selected = Some(Repair::default());
            report.repaired_source = Some(text.into_owned());
            report.timings.total = start.elapsed();
            return Ok(report);
        }
        self.repair_ast(&ast, &oracle, &mut report)?;
        report.timings.total = start.elapsed();
        Ok(report)
    }

    fn repair_ast(&self, ast: &Ast, oracle: &TestOracle<'_>, report: &mut RepairReport) -> Result<(), EngineError> {
        let t0 = Instant::now();
        let e_i = enhance(ast);
        let author = if self.options.exclude_same_author {
            author_of(&report.program_id).map(str::to_string)
        } else {
            None
        };
        let pool: Vec<(&str, &TokenSequence)> = self
            .corpus
            .entries
            .iter()
            .filter(|e| author.is_none() || author_of(&e.id) != author.as_deref())
            .map(|e| (e.id.as_str(), &e.encoded.tokens))
            .collect();
        let ranked = if pool.is_empty() {
            Vec::new()
        } else {
            retrieve_candidates(&e_i.tokens, &pool, self.candidate_limit())?
        };
        report.timings.retrieve = t0.elapsed();

        let t1 = Instant::now();
        let results: Vec<Option<Candidate>> = ranked
            .par_iter()
            .enumerate()
            .map(|(rank, (id, sim))| {
                let entry = self.corpus.entry(id).expect("ranked ids come from the corpus");
                self.candidate_repair(ast, &e_i, &entry.ast, &entry.encoded, oracle)
                    .map(|r| r.map(|repair| Candidate { rank, repair, similarity: *sim }))
            })
            .collect::<Result<_, EngineError>>()?;
        let mut valid: Vec<Candidate> = results.into_iter().flatten().collect();
        valid.sort_by_key(|c| c.rank);
        report.validated_candidates = valid.len();
        report.timings.candidates = t1.elapsed();
        debug!("{}: {} of {} candidates validated", report.program_id, valid.len(), ranked.len());

        let sims: Vec<(String, Similarity)> = valid.iter().map(|c| (c.repair.candidate_id.clone(), c.similarity)).collect();
        let Ok(selected) = select_candidate(valid.into_iter().map(|c| c.repair).collect()) else {
            report.status = Status::NoCandidate;
            return Ok(());
        };
        report.similarity = sims.iter().find(|(id, _)| *id == selected.candidate_id).map(|x| x.1);
        report.candidate_id = Some(selected.candidate_id.clone());

        let t2 = Instant::now();
        let seq_i = &e_i.tokens;
        let mut final_repair = selected.clone();
        if self.options.minimize {
            let m = minimize(&selected, seq_i, oracle)?;
            report.trials = m.trials;
            final_repair = m.repair;
        }
        let mut tokens = apply_edits(seq_i, &final_repair.edits).expect("minimised edits stay consistent");
        if !oracle.passes(&tokens)? {
            // Minimisation only keeps judged-passing subsets; stay safe anyway.
            final_repair = selected.clone();
            tokens = apply_edits(seq_i, &final_repair.edits).expect("selected repair applies");
        }
        report.timings.minimize = t2.elapsed();
        report.repaired_source = Some(render(&tokens));
        report.repair = Some(final_repair);
        report.selected = Some(selected);
        Ok(())
    }

    /// Normalises one reference, validates it, and derives its repair.
    fn candidate_repair(
        &self,
        ast_i: &Ast,
        e_i: &EnhancedSequence,
        ast_j: &Ast,
        e_j: &EnhancedSequence,
        oracle: &TestOracle<'_>,
    ) -> Result<Option<Repair>, EngineError> {
        let first = best_alignment(e_i, e_j)?;
        let map = infer_identifier_map(&first, &e_i.tokens, &e_j.tokens, self.options.thresholds);
        let ast_jp = transform(ast_j, &map);
        let seq_jp = token_sequence(&ast_jp);
        if !oracle.passes(&seq_jp)? {
            debug!("{}: normalised reference fails its tests", ast_j.source_id());
            return Ok(None);
        }
        let e_jp = enhance(&ast_jp);
        let align = best_alignment(e_i, &e_jp)?;
        let raw = extract_edits(&e_i.tokens, &seq_jp, &align);
        let refined = refine_edits(&raw, ast_i, &e_i.tokens, &ast_jp, &seq_jp);
        debug_assert_eq!(
            apply_edits(&e_i.tokens, &refined.edits).map(|s| s.lexemes().join(" ")),
            Ok(seq_jp.lexemes().join(" "))
        );
        Ok(Some(Repair {
            candidate_id: ast_j.source_id().to_string(),
            ..refined
        }))
    }
}

/// Escapes a field of the tab-separated edit list.
pub fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            _ => out.push(c),
        }
    }
    out
}

pub fn edit_record(e: &Edit) -> String {
    format!(
        "{}\t{}\t{}\t{}",
        e.kind,
        e.location,
        escape_field(&join_lexemes(&e.removed)),
        escape_field(&join_lexemes(&e.inserted))
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Emit {
    Diff,
    Edits,
    #[default]
    Both,
}

/// Token-level hunks, one per edit.
pub fn format_diff(report: &RepairReport) -> String {
    let mut out = String::new();
    let Some(repair) = &report.repair else { return out };
    let id = &report.program_id;
    let _ = writeln!(out, "--- {id}");
    match &report.candidate_id {
        Some(c) => {
            let _ = writeln!(out, "+++ {id} (reference {c})");
        }
        None => {
            let _ = writeln!(out, "+++ {id}");
        }
    }
    for e in &repair.edits {
        let line = report
            .token_lines
            .get(e.location)
            .or(report.token_lines.last())
            .copied()
            .unwrap_or(1);
        let _ = writeln!(out, "@@ {} at token {} (line {}) @@", e.kind, e.location, line);
        if e.kind != EditKind::Insert {
            let _ = writeln!(out, "-{}", join_lexemes(&e.removed));
        }
        if e.kind != EditKind::Delete {
            let _ = writeln!(out, "+{}", join_lexemes(&e.inserted));
        }
    }
    out
}

pub fn format_report(report: &RepairReport, emit: Emit) -> String {
    let mut out = String::new();
    if emit != Emit::Edits {
        out.push_str(&format_diff(report));
    }
    if emit != Emit::Diff {
        out.push_str("---EDITS---\n");
        if let Some(r) = &report.repair {
            for e in &r.edits {
                out.push_str(&edit_record(e));
                out.push('\n');
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct BatchEntry {
    pub report: RepairReport,
    /// Independent re-judgement of the emitted repair.
    pub rejudged_ok: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct BatchSummary {
    pub entries: Vec<BatchEntry>,
}

impl BatchSummary {
    pub fn total(&self) -> usize {
        self.entries.len()
    }

    pub fn repaired(&self) -> usize {
        self.entries.iter().filter(|e| e.report.status == Status::Repaired).count()
    }

    pub fn accurate(&self) -> usize {
        self.entries.iter().filter(|e| e.rejudged_ok == Some(true)).count()
    }

    /// Coverage in percent; `None` for an empty batch.
    pub fn coverage(&self) -> Option<f64> {
        (self.total() > 0).then(|| 100.0 * self.repaired() as f64 / self.total() as f64)
    }

    pub fn accuracy(&self) -> Option<f64> {
        (self.repaired() > 0).then(|| 100.0 * self.accurate() as f64 / self.repaired() as f64)
    }

    pub fn mean_time(&self) -> Option<Duration> {
        let done: Vec<Duration> = self
            .entries
            .iter()
            .filter(|e| e.report.status == Status::Repaired)
            .map(|e| e.report.timings.total)
            .collect();
        (!done.is_empty()).then(|| done.iter().sum::<Duration>() / done.len() as u32)
    }

    /// Deterministic text report (no timings).
    pub fn format(&self) -> String {
        let pct = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.1}%"));
        let mut out = String::new();
        for e in &self.entries {
            let r = &e.report;
            let edits = r.repair.as_ref().map_or("-".to_string(), |x| x.len().to_string());
            let cand = r.candidate_id.as_deref().unwrap_or("-");
            let judged = match (e.rejudged_ok, &e.error) {
                (_, Some(_)) => "error",
                (Some(true), _) => "AC",
                (Some(false), _) => "FAIL",
                (None, _) => "-",
            };
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", r.program_id, r.status.as_str(), edits, cand, judged);
        }
        let _ = writeln!(out, "total: {}", self.total());
        let _ = writeln!(out, "repaired: {}", self.repaired());
        let _ = writeln!(out, "coverage: {}", pct(self.coverage()));
        let _ = writeln!(out, "accuracy: {}", pct(self.accuracy()));
        out
    }
}

/// Repairs every source file of `incorrect_dir` and re-judges each emitted
/// repair with `rejudge` (a judge with cold caches).
pub fn run_batch(engine: &Engine<'_>, rejudge: &Judge, incorrect_dir: &Path) -> Result<BatchSummary, EngineError> {
    let files = list_sources(incorrect_dir)?;
    let problem = &engine.corpus.problem;
    let entries = files
        .par_iter()
        .map(|path| {
            let id = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            match engine.repair_file(path) {
                Ok(report) => {
                    let lang = language_of(path).unwrap_or(problem.language);
                    let (rejudged_ok, error) = match &report.repaired_source {
                        Some(src) if report.status == Status::Repaired => {
                            match rejudge.passes_all(src, lang, &problem.tests, problem.limits) {
                                Ok(ok) => (Some(ok), None),
                                Err(e) => (None, Some(e.to_string())),
                            }
                        }
                        _ => (None, None),
                    };
                    info!("{id}: {}", report.status.as_str());
                    BatchEntry { report, rejudged_ok, error }
                }
                Err(e) => {
                    let mut report = RepairReport::new(&id, Status::NoCandidate);
                    report.message = Some(e.to_string());
                    BatchEntry {
                        report,
                        rejudged_ok: None,
                        error: Some(e.to_string()),
                    }
                }
            }
        })
        .collect();
    Ok(BatchSummary { entries })
}
