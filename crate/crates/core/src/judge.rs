//! Compiles programs with an external compiler and runs them against test
//! cases under resource limits.

use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::os::unix::process::{CommandExt, ExitStatusExt};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::frontend::Language;

/// Environment variable that replaces the compiler command for every language.
pub const TOOLCHAIN_ENV: &str = "FAPR_TOOLCHAIN";

const OUTPUT_CAP: u64 = 64 << 20;

#[derive(Debug, Error)]
pub enum JudgeError {
    #[error("compiler `{0}` not found")]
    ToolchainMissing(String),
    #[error("sandbox failure: {0}")]
    SandboxFailure(String),
}

impl JudgeError {
    fn sandbox(context: &str, e: std::io::Error) -> JudgeError {
        JudgeError::SandboxFailure(format!("{context}: {e}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestCase {
    pub id: String,
    pub input: Vec<u8>,
    pub expected_output: Vec<u8>,
}

impl TestCase {
    pub fn new(id: impl Into<String>, input: impl Into<Vec<u8>>, expected: impl Into<Vec<u8>>) -> Self {
        TestCase {
            id: id.into(),
            input: input.into(),
            expected_output: expected.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Limits {
    pub cpu_seconds: u64,
    pub memory_bytes: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            cpu_seconds: 2,
            memory_bytes: 256 << 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Ac,
    Wa,
    Tle,
    Re,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Ac => "AC",
            Outcome::Wa => "WA",
            Outcome::Tle => "TLE",
            Outcome::Re => "RE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompileStatus {
    Ok,
    Ce(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub compile: CompileStatus,
    pub per_test: Vec<(String, Outcome)>,
}

impl Verdict {
    pub fn accepted(&self) -> bool {
        self.compile == CompileStatus::Ok && self.per_test.iter().all(|(_, o)| *o == Outcome::Ac)
    }

    /// Overall label: CE, the first non-AC outcome, or AC.
    pub fn summary(&self) -> &'static str {
        match &self.compile {
            CompileStatus::Ce(_) => "CE",
            CompileStatus::Ok => self
                .per_test
                .iter()
                .map(|(_, o)| *o)
                .find(|o| *o != Outcome::Ac)
                .unwrap_or(Outcome::Ac)
                .as_str(),
        }
    }
}

/// Compiler commands and flags per language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Toolchain {
    pub c_compiler: Vec<String>,
    pub cxx_compiler: Vec<String>,
    pub c_flags: Vec<String>,
    pub cxx_flags: Vec<String>,
}

impl Default for Toolchain {
    fn default() -> Self {
        let words = |s: &str| s.split_whitespace().map(String::from).collect::<Vec<_>>();
        Toolchain {
            c_compiler: words("gcc"),
            cxx_compiler: words("g++"),
            c_flags: words("-O2 -w -std=gnu11 -x c"),
            cxx_flags: words("-O2 -w -std=gnu++17 -x c++"),
        }
    }
}

impl Toolchain {
    /// Defaults, with the compiler command taken from `FAPR_TOOLCHAIN` if set.
    pub fn from_env() -> Self {
        let mut tc = Toolchain::default();
        if let Ok(cmd) = std::env::var(TOOLCHAIN_ENV) {
            let words: Vec<String> = cmd.split_whitespace().map(String::from).collect();
            if !words.is_empty() {
                tc.c_compiler = words.clone();
                tc.cxx_compiler = words;
            }
        }
        tc
    }

    fn command(&self, lang: Language) -> (&[String], &[String]) {
        match lang {
            Language::C => (&self.c_compiler, &self.c_flags),
            Language::Cpp => (&self.cxx_compiler, &self.cxx_flags),
        }
    }
}

struct Semaphore {
    free: Mutex<usize>,
    cv: Condvar,
}

struct Permit<'a>(&'a Semaphore);

impl Semaphore {
    fn new(n: usize) -> Self {
        Semaphore {
            free: Mutex::new(n.max(1)),
            cv: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
        while *free == 0 {
            free = self.cv.wait(free).unwrap_or_else(|e| e.into_inner());
        }
        *free -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap_or_else(|e| e.into_inner()) += 1;
        self.0.cv.notify_one();
    }
}

/// A compiled executable owned by its [`Judge`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub path: PathBuf,
    pub hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Compiled {
    Ok(Artifact),
    Ce(String),
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct JudgeStats {
    pub compiles: usize,
    pub compile_cache_hits: usize,
    pub runs: usize,
    pub verdict_cache_hits: usize,
}

/// Thread-safe compile-and-run pool with bounded parallelism.
pub struct Judge {
    toolchain: Toolchain,
    pool: Semaphore,
    store: tempfile::TempDir,
    compiled: Mutex<HashMap<String, Arc<Mutex<Option<Compiled>>>>>,
    verdicts: Mutex<HashMap<String, Verdict>>,
    compiles: AtomicUsize,
    compile_hits: AtomicUsize,
    runs: AtomicUsize,
    verdict_hits: AtomicUsize,
}

fn digest(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl Judge {
    pub fn new(toolchain: Toolchain, jobs: usize) -> Result<Judge, JudgeError> {
        let store = tempfile::Builder::new()
            .prefix("tokfix-judge-")
            .tempdir()
            .map_err(|e| JudgeError::sandbox("creating artifact store", e))?;
        Ok(Judge {
            toolchain,
            pool: Semaphore::new(jobs),
            store,
            compiled: Mutex::new(HashMap::new()),
            verdicts: Mutex::new(HashMap::new()),
            compiles: AtomicUsize::new(0),
            compile_hits: AtomicUsize::new(0),
            runs: AtomicUsize::new(0),
            verdict_hits: AtomicUsize::new(0),
        })
    }

    pub fn toolchain(&self) -> &Toolchain {
        &self.toolchain
    }

    pub fn stats(&self) -> JudgeStats {
        JudgeStats {
            compiles: self.compiles.load(Ordering::Relaxed),
            compile_cache_hits: self.compile_hits.load(Ordering::Relaxed),
            runs: self.runs.load(Ordering::Relaxed),
            verdict_cache_hits: self.verdict_hits.load(Ordering::Relaxed),
        }
    }

    fn source_hash(&self, source: &str, lang: Language) -> String {
        let (cc, flags) = self.toolchain.command(lang);
        let cmd = [cc, flags].concat().join("\u{1f}");
        digest(&[lang.name().as_bytes(), cmd.as_bytes(), source.as_bytes()])
    }

    /// Compiles `source`; identical source, language and flags compile once.
    pub fn compile(&self, source: &str, lang: Language) -> Result<Compiled, JudgeError> {
        let hash = self.source_hash(source, lang);
        let slot = {
            let mut map = self.compiled.lock().unwrap_or_else(|e| e.into_inner());
            map.entry(hash.clone()).or_default().clone()
        };
        let mut slot = slot.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(done) = slot.as_ref() {
            self.compile_hits.fetch_add(1, Ordering::Relaxed);
            return Ok(done.clone());
        }
        let result = self.compile_uncached(source, lang, &hash)?;
        *slot = Some(result.clone());
        Ok(result)
    }

    fn compile_uncached(&self, source: &str, lang: Language, hash: &str) -> Result<Compiled, JudgeError> {
        let _permit = self.pool.acquire();
        self.compiles.fetch_add(1, Ordering::Relaxed);
        let scratch = tempfile::Builder::new()
            .prefix("build-")
            .tempdir_in(self.store.path())
            .map_err(|e| JudgeError::sandbox("creating build dir", e))?;
        let ext = if lang == Language::C { "c" } else { "cpp" };
        let src_path = scratch.path().join(format!("main.{ext}"));
        fs::write(&src_path, source).map_err(|e| JudgeError::sandbox("writing source", e))?;
        let exe = self.store.path().join(format!("{hash}.bin"));
        let (cc, flags) = self.toolchain.command(lang);
        let Some((program, pre)) = cc.split_first() else {
            return Err(JudgeError::ToolchainMissing(String::new()));
        };
        let out = Command::new(program)
            .args(pre)
            .args(flags)
            .arg(&src_path)
            .arg("-o")
            .arg(&exe)
            .current_dir(scratch.path())
            .stdin(Stdio::null())
            .output()
            .map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound | std::io::ErrorKind::PermissionDenied => {
                    JudgeError::ToolchainMissing(program.clone())
                }
                _ => JudgeError::sandbox("spawning compiler", e),
            })?;
        if out.status.success() && exe.exists() {
            Ok(Compiled::Ok(Artifact {
                path: exe,
                hash: hash.to_string(),
            }))
        } else {
            Ok(Compiled::Ce(String::from_utf8_lossy(&out.stderr).into_owned()))
        }
    }

    /// Runs each test in its own scratch directory.
    pub fn run_tests(&self, artifact: &Artifact, tests: &[TestCase], limits: Limits) -> Result<Verdict, JudgeError> {
        let mut per_test = Vec::with_capacity(tests.len());
        for t in tests {
            per_test.push((t.id.clone(), self.run_one(&artifact.path, t, limits)?));
        }
        Ok(Verdict {
            compile: CompileStatus::Ok,
            per_test,
        })
    }

    fn run_one(&self, exe: &Path, test: &TestCase, limits: Limits) -> Result<Outcome, JudgeError> {
        let _permit = self.pool.acquire();
        self.runs.fetch_add(1, Ordering::Relaxed);
        let scratch = tempfile::Builder::new()
            .prefix("run-")
            .tempdir_in(self.store.path())
            .map_err(|e| JudgeError::sandbox("creating run dir", e))?;
        let mut cmd = Command::new(exe);
        cmd.current_dir(scratch.path())
            .env_clear()
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null());
        let Limits {
            cpu_seconds,
            memory_bytes,
        } = limits;
        // SAFETY: only async-signal-safe setrlimit calls run between fork and exec.
        unsafe {
            cmd.pre_exec(move || {
                let set = |res, soft: u64, hard: u64| {
                    let lim = libc::rlimit {
                        rlim_cur: soft as libc::rlim_t,
                        rlim_max: hard as libc::rlim_t,
                    };
                    if libc::setrlimit(res, &lim) != 0 {
                        return Err(std::io::Error::last_os_error());
                    }
                    Ok(())
                };
                set(libc::RLIMIT_CPU, cpu_seconds, cpu_seconds + 1)?;
                set(libc::RLIMIT_AS, memory_bytes, memory_bytes)?;
                set(libc::RLIMIT_FSIZE, 16 << 20, 16 << 20)?;
                set(libc::RLIMIT_CORE, 0, 0)?;
                Ok(())
            });
        }
        let mut child = cmd.spawn().map_err(|e| JudgeError::sandbox("spawning program", e))?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let input = test.input.clone();
        let writer = thread::spawn(move || {
            // A program may exit without reading its input; ignore EPIPE.
            let _ = stdin.write_all(&input);
        });
        let mut stdout = child.stdout.take().expect("piped stdout");
        let reader = thread::spawn(move || {
            let mut buf = Vec::new();
            let _ = (&mut stdout).take(OUTPUT_CAP).read_to_end(&mut buf);
            buf
        });
        let deadline = Instant::now() + Duration::from_secs(cpu_seconds * 2 + 1);
        let mut timed_out = false;
        let status = loop {
            match child.try_wait() {
                Ok(Some(status)) => break status,
                Ok(None) if Instant::now() >= deadline => {
                    timed_out = true;
                    let _ = child.kill();
                    break child.wait().map_err(|e| JudgeError::sandbox("waiting for program", e))?;
                }
                Ok(None) => thread::sleep(Duration::from_millis(2)),
                Err(e) => return Err(JudgeError::sandbox("waiting for program", e)),
            }
        };
        let _ = writer.join();
        let output = reader.join().unwrap_or_default();
        if timed_out || matches!(status.signal(), Some(libc::SIGXCPU)) {
            return Ok(Outcome::Tle);
        }
        if status.signal().is_some() || !status.success() {
            return Ok(Outcome::Re);
        }
        Ok(if outputs_match(&output, &test.expected_output) {
            Outcome::Ac
        } else {
            Outcome::Wa
        })
    }

    /// Compile and run; verdicts for identical inputs are cached.
    pub fn judge(&self, source: &str, lang: Language, tests: &[TestCase], limits: Limits) -> Result<Verdict, JudgeError> {
        let mut parts: Vec<&[u8]> = Vec::new();
        let src_hash = self.source_hash(source, lang);
        let lim = format!("{}/{}", limits.cpu_seconds, limits.memory_bytes);
        parts.push(src_hash.as_bytes());
        parts.push(lim.as_bytes());
        for t in tests {
            parts.extend([t.id.as_bytes(), &t.input[..], &t.expected_output[..]]);
        }
        let key = digest(&parts);
        if let Some(v) = self.verdicts.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            self.verdict_hits.fetch_add(1, Ordering::Relaxed);
            return Ok(v.clone());
        }
        let verdict = match self.compile(source, lang)? {
            Compiled::Ce(diag) => Verdict {
                compile: CompileStatus::Ce(diag),
                per_test: Vec::new(),
            },
            Compiled::Ok(art) => self.run_tests(&art, tests, limits)?,
        };
        self.verdicts
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .insert(key, verdict.clone());
        Ok(verdict)
    }

    pub fn passes_all(&self, source: &str, lang: Language, tests: &[TestCase], limits: Limits) -> Result<bool, JudgeError> {
        Ok(self.judge(source, lang, tests, limits)?.accepted())
    }
}

/// Line-based comparison ignoring trailing whitespace per line and trailing
/// blank lines.
pub fn outputs_match(actual: &[u8], expected: &[u8]) -> bool {
    fn lines(b: &[u8]) -> Vec<&[u8]> {
        let mut v: Vec<&[u8]> = b
            .split(|&c| c == b'\n')
            .map(|l| {
                let end = l.iter().rposition(|c| !c.is_ascii_whitespace()).map_or(0, |p| p + 1);
                &l[..end]
            })
            .collect();
        while v.last().is_some_and(|l| l.is_empty()) {
            v.pop();
        }
        v
    }
    lines(actual) == lines(expected)
}
