use std::fs::{self, OpenOptions};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::info;

use super::output::write_atomic;
use crate::error::{Error, Result};
use crate::ingest::{parse_snapshot, CardStore, FetchConfig, ParseOptions, RegistryClient, ResumeToken};

#[derive(Debug, Clone)]
pub struct FetchRequest {
    pub config: FetchConfig,
    /// Snapshot file; pages are appended as NDJSON lines.
    pub out: PathBuf,
    /// Also download cards into this store. A missing path becomes a
    /// directory store; an existing file is rewritten as an archive.
    pub cards: Option<PathBuf>,
    /// Continue from the checkpoint next to `out` if there is one.
    pub resume: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchOutcome {
    pub records: u64,
    pub pages: u64,
    pub cards_present: usize,
    pub cards_absent: usize,
}

pub fn checkpoint_path(out: &Path) -> PathBuf {
    let mut p = out.as_os_str().to_owned();
    p.push(".resume.json");
    PathBuf::from(p)
}

/// Download the listing into `out`, checkpointing after every page so an
/// aborted run can be resumed; then optionally download cards.
pub fn cmd_fetch(req: &FetchRequest) -> Result<FetchOutcome> {
    let client = RegistryClient::new(req.config.clone())?;
    let checkpoint = checkpoint_path(&req.out);
    let resume: Option<ResumeToken> =
        if req.resume && checkpoint.is_file() { Some(serde_json::from_slice(&fs::read(&checkpoint)?)?) } else { None };
    if let Some(dir) = req.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let file = OpenOptions::new().create(true).append(resume.is_some()).write(true).truncate(resume.is_none()).open(&req.out)?;
    let mut w = BufWriter::new(file);
    let token = client.fetch_snapshot(resume, |page, next| {
        for record in &page {
            serde_json::to_writer(&mut w, record)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        w.get_ref().sync_data()?;
        write_atomic(&checkpoint, &serde_json::to_vec(next)?)
    })?;
    drop(w);
    fs::remove_file(&checkpoint).ok();
    info!("fetched {} records in {} pages", token.records_done, token.pages_done);

    let mut outcome = FetchOutcome { records: token.records_done, pages: token.pages_done, cards_present: 0, cards_absent: 0 };
    if let Some(store) = &req.cards {
        if !store.exists() {
            fs::create_dir_all(store)?;
        }
        let snapshot = parse_snapshot(BufReader::new(fs::File::open(&req.out)?), &ParseOptions::default())?;
        let ids: Vec<&str> = snapshot.records.iter().map(|r| r.model_id.as_str()).collect();
        let fetched = client.fetch_cards(&ids)?;
        let present: Vec<(&str, &str)> = fetched.cards.iter().filter_map(|(id, text)| text.as_deref().map(|t| (id.as_str(), t))).collect();
        CardStore::open(store).write(present.iter().copied())?;
        outcome.cards_present = present.len();
        outcome.cards_absent = fetched.cards.len() - present.len();
        if let Some(reason) = fetched.aborted {
            return Err(Error::FetchAborted {
                reason: format!("{reason}; {} cards not fetched", fetched.pending.len()),
                resume_token: token,
            });
        }
    }
    Ok(outcome)
}
