#![allow(dead_code)]

use std::path::PathBuf;

use catalia::backend::{Backend, BackendConfig, TranscriptMode};
use catalia::chc::{parse_system, ChcSystem};
use catalia::driver::SolveConfig;

pub fn corpus(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn system(name: &str) -> ChcSystem {
    parse_system(&corpus(name)).unwrap()
}

/// Solver backed by committed transcripts: recorded answers are reused, and
/// new queries reach the solver (and are recorded) only when it is installed.
pub fn backend() -> Backend {
    Backend::new(backend_config())
}

pub fn backend_config() -> BackendConfig {
    let mut cfg = BackendConfig::default();
    if let Ok(exe) = std::env::var("CATALIA_Z3") {
        cfg.executable = exe.into();
    }
    cfg.transcripts = Some(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/transcripts"));
    cfg.transcript_mode = match std::env::var("CATALIA_TRANSCRIPTS").as_deref() {
        Ok("replay") => TranscriptMode::Replay,
        Ok("record") => TranscriptMode::Record,
        _ => TranscriptMode::Auto,
    };
    cfg
}

pub fn solve_config() -> SolveConfig {
    SolveConfig {
        backend: backend_config(),
        ..SolveConfig::default()
    }
}
