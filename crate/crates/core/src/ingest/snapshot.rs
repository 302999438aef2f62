//! Newline-delimited snapshot files.
//!
//! Each non-blank line is one JSON object using the registry's own field
//! names:
//!
//! | field           | type                  | required |
//! |-----------------|-----------------------|----------|
//! | `id`/`modelId`  | string                | yes      |
//! | `createdAt`     | RFC 3339 timestamp    | yes      |
//! | `downloads`     | non-negative integer  | no (0)   |
//! | `likes`         | non-negative integer  | no (0)   |
//! | `trendingScore` | number                | no       |
//! | `pipeline_tag`  | string                | no       |
//! | `library_name`  | string                | no       |
//! | `tags`          | array of strings      | no       |
//! | `card`          | string (card text)    | no       |
//!
//! Unknown fields are ignored.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use chrono::{DateTime, SecondsFormat, Utc};
use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::record::ModelRecord;
use crate::error::{Error, Result};

const BATCH_LINES: usize = 16 * 1024;

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct WireRecord {
    #[serde(alias = "modelId")]
    pub id: String,
    #[serde(rename = "createdAt")]
    pub created_at: String,
    #[serde(default)]
    pub downloads: u64,
    #[serde(default)]
    pub likes: u64,
    #[serde(rename = "trendingScore", default, skip_serializing_if = "Option::is_none")]
    pub trending_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline_tag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub library_name: Option<String>,
    #[serde(default)]
    pub tags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub card: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ParseOptions {
    /// Fraction of malformed non-blank lines above which the snapshot is rejected.
    pub max_malformed_fraction: f64,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self { max_malformed_fraction: 0.10 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseReport {
    pub lines: usize,
    pub malformed: usize,
    pub duplicates: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct Snapshot {
    /// Sorted by `model_id`.
    pub records: Vec<ModelRecord>,
    pub report: ParseReport,
}

fn parse_line(line: &[u8]) -> std::result::Result<(ModelRecord, Vec<String>), String> {
    let text = std::str::from_utf8(line).map_err(|e| format!("invalid utf-8: {e}"))?;
    let wire: WireRecord = serde_json::from_str(text).map_err(|e| e.to_string())?;
    wire.into_record()
}

impl WireRecord {
    pub(crate) fn into_record(self) -> std::result::Result<(ModelRecord, Vec<String>), String> {
        let id = self.id.trim();
        if id.is_empty() {
            return Err("empty model id".into());
        }
        let created_at = DateTime::parse_from_rfc3339(&self.created_at)
            .map_err(|e| format!("bad createdAt {:?}: {e}", self.created_at))?
            .with_timezone(&Utc);
        let mut b = ModelRecord::builder(id, created_at).downloads(self.downloads).likes(self.likes).tags(self.tags);
        if let Some(score) = self.trending_score {
            if !score.is_finite() {
                return Err("non-finite trendingScore".into());
            }
            b = b.trending_score(score);
        }
        if let Some(t) = self.pipeline_tag.filter(|t| !t.is_empty()) {
            b = b.pipeline_tag(t);
        }
        if let Some(l) = self.library_name.filter(|l| !l.is_empty()) {
            b = b.library_name(l);
        }
        if let Some(c) = self.card {
            b = b.card(c);
        }
        let (record, warnings) = b.build_reporting();
        let warnings = warnings.into_iter().map(|w| format!("{}: {w}", record.model_id)).collect();
        Ok((record, warnings))
    }

    pub(crate) fn from_record(record: &ModelRecord) -> Self {
        WireRecord {
            id: record.model_id.clone(),
            created_at: record.created_at.to_rfc3339_opts(SecondsFormat::AutoSi, true),
            downloads: record.downloads,
            likes: record.likes,
            trending_score: record.trending_score,
            pipeline_tag: record.pipeline_tag.clone(),
            library_name: record.library_name.clone(),
            tags: record.raw_tags.clone(),
            card: record.card_text.clone(),
        }
    }
}

/// Parse a newline-delimited snapshot.
///
/// Malformed lines are skipped and counted; if they exceed
/// `opts.max_malformed_fraction` of the non-blank lines the whole snapshot is
/// rejected. Duplicate ids keep their first occurrence. The output is sorted
/// by model id.
pub fn parse_snapshot<R: BufRead>(mut input: R, opts: &ParseOptions) -> Result<Snapshot> {
    let mut report = ParseReport::default();
    let mut records = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    let mut batch: Vec<Vec<u8>> = Vec::with_capacity(BATCH_LINES);
    let mut line_no = 0usize;

    let mut flush = |batch: &mut Vec<Vec<u8>>, first_line: usize, report: &mut ParseReport| {
        let parsed: Vec<_> = batch.par_iter().map(|l| parse_line(l)).collect();
        for (offset, result) in parsed.into_iter().enumerate() {
            match result {
                Ok((record, warnings)) => {
                    for w in warnings {
                        warn!("{w}");
                        report.warnings.push(w);
                    }
                    if seen.contains(&record.model_id) {
                        let w = format!("duplicate model id {} on line {}; keeping first", record.model_id, first_line + offset);
                        warn!("{w}");
                        report.warnings.push(w);
                        report.duplicates += 1;
                    } else {
                        seen.insert(record.model_id.clone());
                        records.push(record);
                    }
                }
                Err(e) => {
                    log::debug!("line {}: {e}", first_line + offset);
                    report.malformed += 1;
                }
            }
        }
        batch.clear();
    };

    let mut buf = Vec::new();
    let mut batch_start = 1;
    loop {
        buf.clear();
        let n = input.read_until(b'\n', &mut buf)?;
        if n == 0 {
            break;
        }
        line_no += 1;
        let trimmed = buf.trim_ascii();
        if trimmed.is_empty() {
            continue;
        }
        if batch.is_empty() {
            batch_start = line_no;
        }
        report.lines += 1;
        batch.push(trimmed.to_vec());
        if batch.len() == BATCH_LINES {
            flush(&mut batch, batch_start, &mut report);
        }
    }
    if !batch.is_empty() {
        flush(&mut batch, batch_start, &mut report);
    }

    if report.lines > 0 && report.malformed as f64 > opts.max_malformed_fraction * report.lines as f64 {
        return Err(Error::CorruptSnapshot { malformed: report.malformed, total: report.lines, threshold: opts.max_malformed_fraction });
    }
    if report.malformed > 0 {
        warn!("skipped {} malformed of {} lines", report.malformed, report.lines);
    }
    records.sort_by(|a, b| a.model_id.cmp(&b.model_id));
    Ok(Snapshot { records, report })
}

/// Write records in the snapshot format read by [`parse_snapshot`].
pub fn write_snapshot<'a, W: Write>(records: impl IntoIterator<Item = &'a ModelRecord>, mut out: W) -> Result<()> {
    for record in records {
        serde_json::to_writer(&mut out, &WireRecord::from_record(record))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
