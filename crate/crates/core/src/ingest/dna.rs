//! Canonical metadata serialization: the string compared when measuring how
//! close two models are.
//!
//! One `key: value` line per field, in this order:
//!
//! ```text
//! model_id, created_at, downloads, likes, trending_score, pipeline_tag,
//! library_name, license, languages, arxiv_ids, parents, tags
//! ```
//!
//! Absent optionals render as `~`. Lists render as `[a, b]`; sets are sorted,
//! `parents` and `tags` keep their original order. A scalar is written bare
//! when it consists only of `[A-Za-z0-9._/:+@-]`, otherwise as a JSON string
//! literal, which keeps the encoding injective. Card text is not included.

use std::fmt::Write;

use chrono::SecondsFormat;

use super::record::ModelRecord;

fn is_bare(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'.' | b'_' | b'/' | b':' | b'+' | b'@' | b'-'))
}

fn push_scalar(out: &mut String, s: &str) {
    if is_bare(s) {
        out.push_str(s);
    } else {
        out.push_str(&serde_json::to_string(s).expect("string serialization is infallible"));
    }
}

fn push_opt(out: &mut String, s: Option<&str>) {
    match s {
        Some(s) => push_scalar(out, s),
        None => out.push('~'),
    }
}

fn push_list<'a>(out: &mut String, items: impl IntoIterator<Item = &'a str>) {
    out.push('[');
    for (i, item) in items.into_iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        push_scalar(out, item);
    }
    out.push(']');
}

pub fn canonical_metadata_string(record: &ModelRecord) -> String {
    let mut out = String::with_capacity(256);
    out.push_str("model_id: ");
    push_scalar(&mut out, &record.model_id);
    out.push_str("\ncreated_at: ");
    out.push_str(&record.created_at.to_rfc3339_opts(SecondsFormat::AutoSi, true));
    let _ = write!(out, "\ndownloads: {}\nlikes: {}", record.downloads, record.likes);
    out.push_str("\ntrending_score: ");
    match record.trending_score {
        Some(v) => {
            let _ = write!(out, "{v:?}");
        }
        None => out.push('~'),
    }
    out.push_str("\npipeline_tag: ");
    push_opt(&mut out, record.pipeline_tag.as_deref());
    out.push_str("\nlibrary_name: ");
    push_opt(&mut out, record.library_name.as_deref());
    out.push_str("\nlicense: ");
    push_opt(&mut out, record.license.as_deref());
    out.push_str("\nlanguages: ");
    push_list(&mut out, record.languages.iter().map(String::as_str));
    out.push_str("\narxiv_ids: ");
    push_list(&mut out, record.arxiv_ids.iter().map(String::as_str));
    out.push_str("\nparents: [");
    for (i, rel) in record.parent_relations.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(rel.kind.as_str());
        out.push(':');
        push_scalar(&mut out, &rel.parent_id);
    }
    out.push(']');
    out.push_str("\ntags: ");
    push_list(&mut out, record.raw_tags.iter().map(String::as_str));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};

    fn base() -> crate::ingest::ModelRecordBuilder {
        ModelRecord::builder("org/model-7b", Utc.with_ymd_and_hms(2024, 5, 1, 12, 0, 0).unwrap()).downloads(10).tags([
            "license:mit",
            "en",
            "text generation",
        ])
    }

    #[test]
    fn differs_only_in_downloads_segment() {
        let a = base().build().metadata_string;
        let b = base().downloads(11).build().metadata_string;
        let diff: Vec<_> = a.lines().zip(b.lines()).filter(|(x, y)| x != y).collect();
        assert_eq!(diff, [("downloads: 10", "downloads: 11")]);
    }

    #[test]
    fn identical_records_give_identical_strings() {
        assert_eq!(base().build().metadata_string, base().build().metadata_string);
    }

    #[test]
    fn awkward_scalars_are_quoted() {
        let s = base().build().metadata_string;
        assert!(s.ends_with("tags: [license:mit, en, \"text generation\"]"), "{s}");
        assert!(s.contains("pipeline_tag: ~"));
    }
}
