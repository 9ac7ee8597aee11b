use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tokfix::corpus::{ingest, verify_corpus, CorpusError, CorpusHandle, IngestOptions};
use tokfix::engine::{format_report, run_batch, Emit, Engine, EngineOptions, Status};
use tokfix::frontend::{export_xml, parse_bytes};
use tokfix::judge::{Judge, Toolchain};

const EXIT_ENV: u8 = 4;

#[derive(Parser)]
#[command(name = "tokfix", version, about = "Repair programs against a corpus of correct solutions")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and cache every correct solution of a problem.
    Preprocess { problem_dir: PathBuf },
    /// Repair one incorrect program.
    Repair {
        problem_dir: PathBuf,
        file: PathBuf,
        #[command(flatten)]
        flags: RepairFlags,
        #[arg(long, value_enum, default_value_t = EmitArg::Both)]
        emit: EmitArg,
    },
    /// Repair every program in a directory and summarise coverage and accuracy.
    Batch {
        problem_dir: PathBuf,
        /// Defaults to `<problem_dir>/incorrect`.
        incorrect_dir: Option<PathBuf>,
        #[command(flatten)]
        flags: RepairFlags,
    },
    /// Re-judge the cached correct solutions and list any that fail.
    Verify {
        problem_dir: PathBuf,
        #[arg(long, default_value_t = 8)]
        jobs: usize,
    },
    /// Print the XML tree of a source file.
    Parse { file: PathBuf },
}

#[derive(Args, Clone)]
struct RepairFlags {
    /// Maximum number of reference candidates.
    #[arg(long)]
    limit: Option<usize>,
    /// Size of the compile/run pool.
    #[arg(long, default_value_t = 8)]
    jobs: usize,
    /// Emit the selected repair without minimisation.
    #[arg(long)]
    no_minimize: bool,
    /// Ignore references by the submission's author (`<author>__<n>.c` names).
    #[arg(long)]
    exclude_same_author: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitArg {
    Diff,
    Edits,
    Both,
}

impl RepairFlags {
    fn options(&self) -> EngineOptions {
        EngineOptions {
            limit: self.limit,
            minimize: !self.no_minimize,
            exclude_same_author: self.exclude_same_author,
            ..EngineOptions::default()
        }
    }
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_ENV)
}

fn load(problem_dir: &Path) -> Result<CorpusHandle, CorpusError> {
    let handle = ingest(problem_dir, &IngestOptions::default())?;
    log::info!(
        "corpus {}: {} solutions ({} parsed, {} cached, {} skipped)",
        handle.problem.id,
        handle.entries.len(),
        handle.stats.parsed,
        handle.stats.cache_hits,
        handle.stats.skipped.len()
    );
    Ok(handle)
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Cmd::Preprocess { problem_dir } => {
            let start = Instant::now();
            match load(&problem_dir) {
                Ok(h) => {
                    println!(
                        "cached {} solutions ({} parses, {} cache hits, {} skipped) in {:.2}s",
                        h.entries.len(),
                        h.stats.parsed,
                        h.stats.cache_hits,
                        h.stats.skipped.len(),
                        start.elapsed().as_secs_f64()
                    );
                    for (id, why) in &h.stats.skipped {
                        eprintln!("skipped {id}: {why}");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Cmd::Repair {
            problem_dir,
            file,
            flags,
            emit,
        } => {
            let corpus = match load(&problem_dir) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let judge = match Judge::new(Toolchain::from_env(), flags.jobs) {
                Ok(j) => j,
                Err(e) => return fail(e),
            };
            let engine = Engine::new(&corpus, &judge, flags.options());
            let report = match with_pool(flags.jobs, || engine.repair_file(&file)) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let emit = match emit {
                EmitArg::Diff => Emit::Diff,
                EmitArg::Edits => Emit::Edits,
                EmitArg::Both => Emit::Both,
            };
            if report.status == Status::Repaired {
                print!("{}", format_report(&report, emit));
            }
            eprintln!(
                "status: {}{}",
                report.status.as_str(),
                report.message.as_deref().map(|m| format!(" ({m})")).unwrap_or_default()
            );
            let t = report.timings;
            eprintln!(
                "time: parse {:.3}s, retrieve {:.3}s, candidates {:.3}s, minimize {:.3}s, total {:.3}s",
                t.parse.as_secs_f64(),
                t.retrieve.as_secs_f64(),
                t.candidates.as_secs_f64(),
                t.minimize.as_secs_f64(),
                t.total.as_secs_f64()
            );
            ExitCode::from(report.status.exit_code() as u8)
        }
        Cmd::Batch {
            problem_dir,
            incorrect_dir,
            flags,
        } => {
            let corpus = match load(&problem_dir) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let (judge, rejudge) = match (
                Judge::new(Toolchain::from_env(), flags.jobs),
                Judge::new(Toolchain::from_env(), flags.jobs),
            ) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return fail(e),
            };
            let dir = incorrect_dir.unwrap_or_else(|| corpus.incorrect_dir());
            let engine = Engine::new(&corpus, &judge, flags.options());
            let summary = match with_pool(flags.jobs, || run_batch(&engine, &rejudge, &dir)) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            print!("{}", summary.format());
            match summary.mean_time() {
                Some(t) => eprintln!("mean repair time: {:.3}s", t.as_secs_f64()),
                None => eprintln!("mean repair time: n/a"),
            }
            ExitCode::SUCCESS
        }
        Cmd::Verify { problem_dir, jobs } => {
            let corpus = match load(&problem_dir) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let judge = match Judge::new(Toolchain::from_env(), jobs) {
                Ok(j) => j,
                Err(e) => return fail(e),
            };
            match with_pool(jobs, || verify_corpus(&corpus, &judge)) {
                Ok(r) => {
                    println!("checked {} solutions, {} flagged", r.checked, r.flagged.len());
                    for (id, v) in &r.flagged {
                        println!("{id}\t{v}");
                    }
                    if r.flagged.is_empty() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => fail(e),
            }
        }
        Cmd::Parse { file } => {
            let bytes = match std::fs::read(&file) {
                Ok(b) => b,
                Err(e) => return fail(format!("{}: {e}", file.display())),
            };
            let lang = tokfix::corpus::language_of(&file).unwrap_or_default();
            match parse_bytes(&bytes, lang) {
                Ok(ast) => {
                    print!("{}", export_xml(&ast));
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(Status::ParseError.exit_code() as u8)
                }
            }
        }
    }
}
