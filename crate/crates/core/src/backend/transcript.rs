//! Recorded solver responses keyed by query hash.

use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use super::{BackendError, Result, RunOutput};

const TIMEOUT_MARK: &str = ";; catalia: timeout\n";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TranscriptMode {
    /// Only recorded answers; a missing entry is an error.
    Replay,
    /// Always call the solver and overwrite the entry.
    Record,
    /// Use a recorded answer when present, otherwise call and record.
    Auto,
}

impl FromStr for TranscriptMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<TranscriptMode, String> {
        match s {
            "replay" => Ok(TranscriptMode::Replay),
            "record" => Ok(TranscriptMode::Record),
            "auto" => Ok(TranscriptMode::Auto),
            _ => Err(format!("unknown transcript mode {s}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TranscriptStore {
    pub dir: PathBuf,
    pub mode: TranscriptMode,
}

impl TranscriptStore {
    pub fn new(dir: PathBuf, mode: TranscriptMode) -> TranscriptStore {
        TranscriptStore { dir, mode }
    }

    /// Hash of the arguments and script. The executable path and timeouts
    /// are excluded so transcripts move between machines.
    pub fn key(args: &[String], script: &str) -> String {
        let mut h = Sha256::new();
        for a in args {
            h.update(a.as_bytes());
            h.update([0u8]);
        }
        h.update(b"\n");
        h.update(script.as_bytes());
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.out"))
    }

    pub fn lookup(&self, key: &str) -> Result<Option<RunOutput>> {
        if self.mode == TranscriptMode::Record {
            return Ok(None);
        }
        match fs::read_to_string(self.path(key)) {
            Ok(text) => Ok(Some(match text.strip_prefix(TIMEOUT_MARK) {
                Some(rest) => RunOutput {
                    stdout: rest.to_string(),
                    timed_out: true,
                },
                None => RunOutput {
                    stdout: text,
                    timed_out: false,
                },
            })),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => match self.mode {
                TranscriptMode::Replay => Err(BackendError::TranscriptMissing(key.to_string())),
                _ => Ok(None),
            },
            Err(e) => Err(e.into()),
        }
    }

    pub fn save(&self, key: &str, out: &RunOutput) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let mut text = String::new();
        if out.timed_out {
            text.push_str(TIMEOUT_MARK);
        }
        text.push_str(&out.stdout);
        fs::write(self.path(key), text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_separate_arguments() {
        let a = TranscriptStore::key(&["-in".into()], "(check-sat)");
        let b = TranscriptStore::key(&["-i".into(), "n".into()], "(check-sat)");
        assert_ne!(a, b);
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn round_trip_and_replay_miss() {
        let dir = tempfile::tempdir().unwrap();
        let store = TranscriptStore::new(dir.path().to_path_buf(), TranscriptMode::Auto);
        let out = RunOutput {
            stdout: "unknown\n".into(),
            timed_out: true,
        };
        store.save("k", &out).unwrap();
        assert_eq!(store.lookup("k").unwrap(), Some(out));
        let replay = TranscriptStore::new(dir.path().to_path_buf(), TranscriptMode::Replay);
        assert!(matches!(replay.lookup("other"), Err(BackendError::TranscriptMissing(_))));
    }
}
