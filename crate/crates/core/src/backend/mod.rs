//! External solver interface over SMT-LIB2 text, plus an internal bounded
//! SLD unfolder used as a fallback refutation engine.

mod horn;
mod proof;
mod smt;
mod transcript;
mod unfold;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::Duration;

use wait_timeout::ChildExt;

pub use horn::{parse_model, ChcResult, HORN_OPTIONS};
pub use proof::{parse_proof, replay, Decide, ProofStep, ReplayError, ResolutionProof};
pub use smt::{default_value, Logic, SmtQuery, SmtResult};
pub use transcript::{TranscriptMode, TranscriptStore};
pub use unfold::{internal_unfold_unsat, UnfoldStats};

#[derive(Debug, thiserror::Error)]
pub enum BackendError {
    #[error("cannot start solver {exe}: {source}")]
    Spawn {
        exe: String,
        #[source]
        source: std::io::Error,
    },
    #[error("solver protocol error: {0}")]
    Protocol(String),
    #[error("cannot parse solver proof: {0}")]
    ProofParse(String),
    #[error("solver model uses unsupported constructs: {0}")]
    ModelUnsupported(String),
    #[error("no recorded transcript for query {0}")]
    TranscriptMissing(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad backend configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, BackendError>;

/// Solver executable, arguments and limits.
#[derive(Debug, Clone)]
pub struct BackendConfig {
    pub executable: PathBuf,
    pub chc_args: Vec<String>,
    pub smt_args: Vec<String>,
    /// Per-call timeout for CHC queries and feasibility checks.
    pub timeout: Duration,
    /// Request a resolution proof for unsatisfiable CHC queries.
    pub proofs: bool,
    /// Extra `(set-option ...)` pairs placed before CHC scripts.
    pub chc_options: Vec<(String, String)>,
    pub transcripts: Option<PathBuf>,
    pub transcript_mode: TranscriptMode,
    /// Largest depth tried by the internal unfolder when no proof is parsed.
    pub unfold_depth: usize,
}

impl Default for BackendConfig {
    fn default() -> BackendConfig {
        BackendConfig {
            executable: PathBuf::from("z3"),
            chc_args: vec!["-in".into(), "-smt2".into()],
            smt_args: vec!["-in".into(), "-smt2".into()],
            timeout: Duration::from_secs(30),
            proofs: true,
            chc_options: HORN_OPTIONS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            transcripts: None,
            transcript_mode: TranscriptMode::Auto,
            unfold_depth: 6,
        }
    }
}

impl BackendConfig {
    /// Reads `key = value` lines; `#` starts a comment. Unknown keys are errors.
    pub fn from_kv(text: &str) -> Result<BackendConfig> {
        let mut cfg = BackendConfig::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| BackendError::Config(format!("line {}: expected key = value", n + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| BackendError::Config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let words = || value.split_whitespace().map(str::to_string).collect::<Vec<_>>();
        match key {
            "executable" => self.executable = PathBuf::from(value),
            "chc_args" => self.chc_args = words(),
            "smt_args" => self.smt_args = words(),
            "timeout" => {
                let secs: f64 = value.parse().map_err(|_| format!("bad timeout {value}"))?;
                if !(secs > 0.0) {
                    return Err("timeout must be positive".into());
                }
                self.timeout = Duration::from_secs_f64(secs);
            }
            "proofs" => self.proofs = value.parse().map_err(|_| format!("bad boolean {value}"))?,
            "chc_option" => {
                let (k, v) = value.split_once(char::is_whitespace).ok_or("chc_option expects a name and a value")?;
                self.chc_options.push((k.trim().to_string(), v.trim().to_string()));
            }
            "transcripts" => self.transcripts = Some(PathBuf::from(value)),
            "transcript_mode" => self.transcript_mode = value.parse()?,
            "unfold_depth" => self.unfold_depth = value.parse().map_err(|_| format!("bad depth {value}"))?,
            other => return Err(format!("unknown key {other}")),
        }
        Ok(())
    }
}

/// Raw solver response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub stdout: String,
    pub timed_out: bool,
}

/// A handle to the configured solver. Each call is a fresh subprocess.
#[derive(Debug, Clone)]
pub struct Backend {
    pub config: BackendConfig,
    store: Option<TranscriptStore>,
}

impl Backend {
    pub fn new(config: BackendConfig) -> Backend {
        let store = config
            .transcripts
            .as_ref()
            .map(|dir| TranscriptStore::new(dir.clone(), config.transcript_mode));
        Backend { config, store }
    }

    /// Runs `script` with `args`; `timeout = None` waits indefinitely.
    pub fn run(&self, args: &[String], script: &str, timeout: Option<Duration>) -> Result<RunOutput> {
        if let Some(store) = &self.store {
            let key = TranscriptStore::key(args, script);
            if let Some(out) = store.lookup(&key)? {
                return Ok(out);
            }
            let out = self.spawn(args, script, timeout)?;
            store.save(&key, &out)?;
            return Ok(out);
        }
        self.spawn(args, script, timeout)
    }

    fn spawn(&self, args: &[String], script: &str, timeout: Option<Duration>) -> Result<RunOutput> {
        let exe = self.config.executable.display().to_string();
        log::trace!("{exe} {}\n{script}", args.join(" "));
        let mut child = Command::new(&self.config.executable)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|source| BackendError::Spawn { exe, source })?;
        let mut stdout = child.stdout.take().expect("piped stdout");
        let reader = std::thread::spawn(move || {
            let mut buf = String::new();
            stdout.read_to_string(&mut buf).map(|_| buf)
        });
        {
            let mut stdin = child.stdin.take().expect("piped stdin");
            // A solver that exits early closes the pipe; its output still tells us why.
            let _ = stdin.write_all(script.as_bytes());
        }
        let timed_out = match timeout {
            None => {
                child.wait()?;
                false
            }
            Some(t) => match child.wait_timeout(t)? {
                Some(_) => false,
                None => {
                    let _ = child.kill();
                    child.wait()?;
                    true
                }
            },
        };
        let stdout = reader
            .join()
            .map_err(|_| BackendError::Protocol("output reader panicked".into()))??;
        log::trace!("-> {stdout}");
        Ok(RunOutput { stdout, timed_out })
    }
}
