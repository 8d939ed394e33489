//! Artifact files. Every file carries the config hash and seed; nothing
//! time-dependent is written, so identical inputs give identical bytes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{RunError, RunResult};

#[derive(Debug, Clone)]
pub struct ArtifactWriter {
    dir: PathBuf,
    command: String,
    hash: String,
    seed: u64,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    config_hash: &'a str,
    seed: u64,
    data: &'a T,
}

impl ArtifactWriter {
    pub fn new(dir: &Path, command: &str, hash: &str, seed: u64) -> RunResult<Self> {
        fs::create_dir_all(dir).map_err(|source| RunError::Io { path: dir.to_path_buf(), source })?;
        Ok(Self { dir: dir.to_path_buf(), command: command.to_string(), hash: hash.to_string(), seed })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn json<T: Serialize>(&self, name: &str, data: &T) -> RunResult<PathBuf> {
        let env = Envelope { command: &self.command, config_hash: &self.hash, seed: self.seed, data };
        let mut text = serde_json::to_string_pretty(&env).map_err(|e| RunError::Encoding(e.to_string()))?;
        text.push('\n');
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(|source| RunError::Io { path: path.clone(), source })?;
        Ok(path)
    }

    /// CSV preceded by `# key=value` header lines.
    pub fn csv(&self, name: &str, header: &[String], rows: &[Vec<String>]) -> RunResult<PathBuf> {
        let path = self.dir.join(name);
        let io = |source| RunError::Io { path: path.clone(), source };
        let mut buf: Vec<u8> = Vec::new();
        writeln!(buf, "# command={}", self.command).map_err(io)?;
        writeln!(buf, "# config_hash={}", self.hash).map_err(io)?;
        writeln!(buf, "# seed={}", self.seed).map_err(io)?;
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(header).map_err(|e| RunError::Encoding(e.to_string()))?;
            for r in rows {
                w.write_record(r).map_err(|e| RunError::Encoding(e.to_string()))?;
            }
            w.flush().map_err(io)?;
        }
        fs::write(&path, buf).map_err(io)?;
        Ok(path)
    }
}

/// Shortest round-trip representation.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn coords<T: std::fmt::Display>(c: &[T]) -> String {
    c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}
