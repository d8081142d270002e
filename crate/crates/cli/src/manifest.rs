//! Output directories and their `manifest.json`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use whitham_core::GridSpec;

use crate::output::{file_sha256, json_pretty, text_sha256, LineWriter, SCHEMA_VERSION};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub n: usize,
    pub period: f64,
    pub dx: f64,
    pub dxi: f64,
    pub nyquist: f64,
}

impl From<&GridSpec> for GridInfo {
    fn from(g: &GridSpec) -> Self {
        GridInfo {
            n: g.n(),
            period: g.period(),
            dx: g.dx(),
            dxi: g.dxi(),
            nyquist: g.nyquist(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub t: f64,
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Canonicalized configuration text.
    pub config: String,
    pub config_hash: String,
    pub grid: Option<GridInfo>,
    pub scheme: Option<String>,
    pub started: String,
    pub finished: String,
    pub wall_seconds: f64,
    /// `complete`, or `partial` when the command stopped on an error.
    pub status: String,
    pub error: Option<String>,
    pub sample_times: Vec<f64>,
    pub snapshots: Vec<SnapshotEntry>,
    pub files: Vec<FileEntry>,
}

impl RunManifest {
    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("cannot read manifest {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("malformed manifest {}", path.display()))
    }

    pub fn checksum(&self, path: &str) -> Option<&str> {
        self.files.iter().find(|f| f.path == path).map(|f| f.sha256.as_str())
    }
}

/// An output directory being filled by one command. Files are registered as they are
/// written; [`RunDir::finish`] checksums them and writes the manifest.
pub struct RunDir {
    root: PathBuf,
    files: Vec<String>,
    manifest: RunManifest,
    clock: Instant,
}

impl RunDir {
    pub fn create(root: &Path, command: &str, config: String) -> Result<Self> {
        std::fs::create_dir_all(root)
            .with_context(|| format!("cannot create output directory {}", root.display()))?;
        let config_hash = text_sha256(&config);
        Ok(RunDir {
            root: root.to_path_buf(),
            files: Vec::new(),
            manifest: RunManifest {
                schema_version: SCHEMA_VERSION,
                tool: "whitham-lab".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                command: command.into(),
                config,
                config_hash,
                grid: None,
                scheme: None,
                started: now(),
                finished: String::new(),
                wall_seconds: 0.0,
                status: "running".into(),
                error: None,
                sample_times: Vec::new(),
                snapshots: Vec::new(),
                files: Vec::new(),
            },
            clock: Instant::now(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn manifest_mut(&mut self) -> &mut RunManifest {
        &mut self.manifest
    }

    /// Opens `rel` for line output and registers it.
    pub fn writer(&mut self, rel: &str) -> Result<LineWriter> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        self.register(rel);
        LineWriter::create(&path)
    }

    pub fn register(&mut self, rel: &str) {
        if !self.files.iter().any(|f| f == rel) {
            self.files.push(rel.to_string());
        }
    }

    /// Writes the manifest. With `error` set the run is marked partial; files that were
    /// registered but never created are left out of the inventory.
    pub fn finish(mut self, error: Option<&anyhow::Error>) -> Result<RunManifest> {
        let mut inventory = Vec::with_capacity(self.files.len());
        for rel in &self.files {
            let path = self.root.join(rel);
            if !path.exists() {
                continue;
            }
            inventory.push(FileEntry {
                path: rel.clone(),
                bytes: std::fs::metadata(&path)?.len(),
                sha256: file_sha256(&path)?,
            });
        }
        let m = &mut self.manifest;
        m.files = inventory;
        m.finished = now();
        m.wall_seconds = self.clock.elapsed().as_secs_f64();
        m.status = if error.is_some() { "partial" } else { "complete" }.into();
        m.error = error.map(|e| format!("{e:#}"));
        let path = self.root.join(MANIFEST_FILE);
        std::fs::write(&path, json_pretty(&self.manifest)?)
            .with_context(|| format!("cannot write {}", path.display()))?;
        Ok(self.manifest)
    }
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_inventory_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut run = RunDir::create(dir.path(), "test", "a = 1\n".into()).unwrap();
        let mut w = run.writer("sub/data.csv").unwrap();
        w.line("x,y").unwrap();
        w.finish().unwrap();
        run.register("never-written.csv");
        let m = run.finish(None).unwrap();
        assert_eq!(m.status, "complete");
        assert_eq!(m.files.len(), 1);
        assert_eq!(m.files[0].bytes, 4);
        assert_eq!(m.config_hash, text_sha256("a = 1\n"));
        let back = RunManifest::read(dir.path()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.checksum("sub/data.csv"), Some(m.files[0].sha256.as_str()));
    }

    #[test]
    fn partial_run_records_error() {
        let dir = tempfile::tempdir().unwrap();
        let run = RunDir::create(dir.path(), "test", String::new()).unwrap();
        let err = anyhow::anyhow!("disk full");
        let m = run.finish(Some(&err)).unwrap();
        assert_eq!(m.status, "partial");
        assert_eq!(m.error.as_deref(), Some("disk full"));
    }
}
