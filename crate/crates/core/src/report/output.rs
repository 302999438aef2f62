use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use super::VERSION;
use crate::error::Result;

pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 of a file, streamed.
pub fn file_digest(path: &Path) -> Result<String> {
    let mut file = fs::File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hasher.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

/// Replace `path` with `bytes` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub rows: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub version: &'static str,
    pub command: String,
    pub config: serde_json::Value,
    pub snapshot_sha256: String,
    pub files: Vec<FileEntry>,
    pub counts: BTreeMap<String, u64>,
    pub warnings: Vec<String>,
}

/// Collects the tables of one command run into an output directory.
///
/// Every CSV starts with three `#` lines: toolkit version, command and the
/// JSON config echo. The run ends with `manifest_<command>.json`.
#[derive(Debug)]
pub struct OutputSet {
    dir: PathBuf,
    command: String,
    config: String,
    snapshot_sha256: String,
    files: Vec<FileEntry>,
    counts: BTreeMap<String, u64>,
    warnings: Vec<String>,
}

impl OutputSet {
    pub fn new(config: &RunConfig, command: impl Into<String>, snapshot_sha256: impl Into<String>) -> Result<Self> {
        fs::create_dir_all(&config.output_dir)?;
        Ok(Self {
            dir: config.output_dir.clone(),
            command: command.into(),
            config: config.echo(),
            snapshot_sha256: snapshot_sha256.into(),
            files: Vec::new(),
            counts: BTreeMap::new(),
            warnings: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn count(&mut self, key: impl Into<String>, value: u64) {
        self.counts.insert(key.into(), value);
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        let message = message.into();
        info!("{message}");
        self.warnings.push(message);
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Write `name` (a file name ending in `.csv`).
    pub fn table<H, R, C>(&mut self, name: &str, header: H, rows: R) -> Result<()>
    where
        H: IntoIterator,
        H::Item: AsRef<str>,
        R: IntoIterator<Item = C>,
        C: IntoIterator,
        C::Item: AsRef<str>,
    {
        let mut buf = Vec::new();
        writeln!(buf, "# lineage {VERSION}")?;
        writeln!(buf, "# command: {}", self.command)?;
        writeln!(buf, "# config: {}", self.config)?;
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(header.into_iter().map(|h| h.as_ref().to_owned()))?;
        let mut n = 0;
        for row in rows {
            w.write_record(row.into_iter().map(|c| c.as_ref().to_owned()))?;
            n += 1;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        write_atomic(&self.dir.join(name), &bytes)?;
        self.files.push(FileEntry { name: name.to_owned(), rows: n, sha256: hex_digest(&bytes) });
        Ok(())
    }

    /// Write the manifest and return its path.
    pub fn finish(self) -> Result<PathBuf> {
        let manifest = Manifest {
            version: VERSION,
            command: self.command.clone(),
            config: serde_json::from_str(&self.config)?,
            snapshot_sha256: self.snapshot_sha256,
            files: self.files,
            counts: self.counts,
            warnings: self.warnings,
        };
        let stem = self.command.split_whitespace().collect::<Vec<_>>().join("_");
        let path = self.dir.join(format!("manifest_{stem}.json"));
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        write_atomic(&path, &bytes)?;
        Ok(path)
    }
}

/// Shortest round-trip decimal form; empty for `None`.
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}
