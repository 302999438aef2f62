//! On-disk cache of parsed snapshots, keyed by the snapshot digest, the
//! toolkit version and the parse options.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use super::output::{file_digest, write_atomic};
use super::VERSION;
use crate::error::Result;
use crate::ingest::{parse_snapshot, ModelRecord, ParseOptions, ParseReport, Snapshot};

#[derive(Serialize, Deserialize)]
struct Entry {
    version: String,
    records: Vec<ModelRecord>,
    report: ParseReport,
}

fn entry_path(dir: &Path, digest: &str, opts: &ParseOptions) -> PathBuf {
    dir.join(format!("snapshot-{digest}-v{VERSION}-m{}.json", opts.max_malformed_fraction))
}

/// A parsed snapshot with its SHA-256. Reads from and fills `cache_dir`
/// when given; an unreadable cache entry is reparsed and replaced.
pub fn load_snapshot(path: &Path, opts: &ParseOptions, cache_dir: Option<&Path>) -> Result<(Snapshot, String)> {
    let digest = file_digest(path)?;
    let cached = cache_dir.map(|d| entry_path(d, &digest, opts));
    if let Some(p) = cached.as_deref().filter(|p| p.is_file()) {
        match fs::read(p).map_err(crate::Error::from).and_then(|b| Ok(serde_json::from_slice::<Entry>(&b)?)) {
            Ok(e) if e.version == VERSION => {
                debug!("cache hit {}", p.display());
                return Ok((Snapshot { records: e.records, report: e.report }, digest));
            }
            Ok(_) => warn!("ignoring cache entry {} from another version", p.display()),
            Err(e) => warn!("ignoring unreadable cache entry {}: {e}", p.display()),
        }
    }
    let snapshot = parse_snapshot(BufReader::new(fs::File::open(path)?), opts)?;
    if let Some(p) = cached {
        let entry = Entry { version: VERSION.to_owned(), records: snapshot.records, report: snapshot.report };
        write_atomic(&p, &serde_json::to_vec(&entry)?)?;
        return Ok((Snapshot { records: entry.records, report: entry.report }, digest));
    }
    Ok((snapshot, digest))
}
