use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use super::output::{fmt_opt, OutputSet};
use super::{finish, RunConfig, RunOutcome, Session};
use crate::error::{Error, Result};
use crate::ingest::{ModelRecord, RelationKind};

pub type TagFlag = (&'static str, fn(&str) -> bool);

/// Documentation and tooling flags read from tags.
pub const DOC_FLAGS: [TagFlag; 4] = [
    ("endpoints_compatible", |t| t == "endpoints_compatible"),
    ("safetensors", |t| t == "safetensors"),
    ("autotrain_compatible", |t| t == "autotrain_compatible"),
    ("doi", |t| t.starts_with("doi:")),
];

/// Values by descending count, ties by value, at most `n`.
pub(crate) fn top_counts<'a>(values: impl IntoIterator<Item = &'a str>, n: usize) -> Vec<(String, u64)> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for v in values {
        *counts.entry(v).or_default() += 1;
    }
    let mut ranked: Vec<(&str, u64)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    ranked.truncate(n);
    ranked.into_iter().map(|(v, c)| (v.to_owned(), c)).collect()
}

fn count_rows(rows: Vec<(String, u64)>) -> impl Iterator<Item = [String; 2]> {
    rows.into_iter().map(|(v, c)| [v, c.to_string()])
}

/// `arxiv_id,category` rows; an id may appear on several rows.
pub fn load_category_map(path: &Path) -> Result<HashMap<String, BTreeSet<String>>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_path(path)?;
    let mut map: HashMap<String, BTreeSet<String>> = HashMap::new();
    for row in reader.records() {
        let row = row?;
        match (row.get(0), row.get(1)) {
            (Some(id), Some(cat)) if !id.is_empty() && !cat.is_empty() => {
                map.entry(id.to_lowercase()).or_default().insert(cat.to_owned());
            }
            _ => return Err(Error::InvalidInput(format!("bad category row {row:?} in {}", path.display()))),
        }
    }
    Ok(map)
}

/// Models per category. A model counts once toward each distinct category
/// of its linked papers. Also returns the number of linked ids without a
/// mapping.
pub fn category_counts(records: &[ModelRecord], map: &HashMap<String, BTreeSet<String>>) -> (Vec<(String, u64)>, u64) {
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    let mut unmapped = 0;
    for r in records {
        let mut cats: BTreeSet<&str> = BTreeSet::new();
        for id in &r.arxiv_ids {
            match map.get(&id.to_lowercase()) {
                Some(c) => cats.extend(c.iter().map(String::as_str)),
                None => unmapped += 1,
            }
        }
        for c in cats {
            *counts.entry(c).or_default() += 1;
        }
    }
    let mut rows: Vec<(String, u64)> = counts.into_iter().map(|(c, n)| (c.to_owned(), n)).collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    (rows, unmapped)
}

pub fn cmd_summary(config: &RunConfig) -> Result<RunOutcome> {
    let s = Session::open(config)?;
    let mut out = s.outputs(config, "summary")?;
    summary_tables(&s, config, &mut out)?;
    finish(out)
}

fn summary_tables(s: &Session, config: &RunConfig, out: &mut OutputSet) -> Result<()> {
    let records = s.graph.records();
    let n = config.top_n;
    if records.is_empty() {
        out.warn("snapshot contains no models");
    }

    let licenses = top_counts(records.iter().filter_map(|r| r.license.as_deref()), n);
    out.table("top_licenses.csv", ["license", "models"], count_rows(licenses))?;
    let tasks = top_counts(records.iter().filter_map(|r| r.pipeline_tag.as_deref()), n);
    out.table("top_tasks.csv", ["task", "models"], count_rows(tasks))?;
    let languages = top_counts(records.iter().flat_map(|r| r.languages.iter().map(String::as_str)), n);
    out.table("top_languages.csv", ["language", "models"], count_rows(languages))?;
    let libraries = top_counts(records.iter().filter_map(|r| r.library_name.as_deref()), n);
    out.table("top_libraries.csv", ["library", "models"], count_rows(libraries))?;
    let datasets =
        top_counts(records.iter().flat_map(|r| r.raw_tags.iter().filter_map(|t| t.strip_prefix("dataset:")).collect::<BTreeSet<_>>()), n);
    out.table("top_datasets.csv", ["dataset", "models"], count_rows(datasets))?;

    let g = &s.graph;
    let mut by_children: Vec<(usize, [usize; 4], &str, bool)> = g
        .nodes()
        .map(|v| {
            let mut kinds = [0; 4];
            for e in g.child_edges(v) {
                kinds[RelationKind::ALL.iter().position(|&k| k == e.kind).expect("known kind")] += 1;
            }
            (kinds.iter().sum(), kinds, g.model_id(v), g.is_external(v))
        })
        .filter(|r| r.0 > 0)
        .collect();
    by_children.sort_by(|a, b| b.0.cmp(&a.0).then(a.2.cmp(b.2)));
    by_children.truncate(n);
    let header = ["model_id", "children"].into_iter().chain(RelationKind::ALL.iter().map(|k| k.as_str())).chain(["external"]);
    out.table(
        "top_models_by_children.csv",
        header,
        by_children.into_iter().map(|(total, kinds, id, ext)| {
            [id.to_owned(), total.to_string()]
                .into_iter()
                .chain(kinds.iter().map(|k| k.to_string()))
                .chain([ext.to_string()])
                .collect::<Vec<_>>()
        }),
    )?;

    let mut by_downloads: Vec<&ModelRecord> = records.iter().collect();
    by_downloads.sort_by(|a, b| b.downloads.cmp(&a.downloads).then(a.model_id.cmp(&b.model_id)));
    by_downloads.truncate(n);
    out.table(
        "top_models_by_downloads.csv",
        ["model_id", "downloads", "likes"],
        by_downloads.into_iter().map(|r| [r.model_id.clone(), r.downloads.to_string(), r.likes.to_string()]),
    )?;

    let linked = records.iter().filter(|r| !r.arxiv_ids.is_empty()).count();
    out.count("models_with_arxiv", linked as u64);
    match &config.arxiv_categories {
        Some(path) => {
            let (rows, unmapped) = category_counts(records, &load_category_map(path)?);
            out.count("unmapped_arxiv_ids", unmapped);
            if unmapped > 0 {
                out.warn(format!("{unmapped} linked arXiv ids have no category mapping"));
            }
            out.table("arxiv_categories.csv", ["category", "models"], count_rows(rows))?;
        }
        None if linked > 0 => out.warn("no arXiv category table given; category counts skipped"),
        None => {}
    }

    let flags = DOC_FLAGS.iter().map(|(name, test)| {
        let (mut with, mut dl_with, mut dl_without) = (0u64, 0u128, 0u128);
        for r in records {
            if r.raw_tags.iter().any(|t| test(t)) {
                with += 1;
                dl_with += u128::from(r.downloads);
            } else {
                dl_without += u128::from(r.downloads);
            }
        }
        let total = records.len() as u64;
        let without = total - with;
        let mean_with = (with > 0).then(|| dl_with as f64 / with as f64);
        let mean_without = (without > 0).then(|| dl_without as f64 / without as f64);
        let ratio = mean_with.zip(mean_without).filter(|m| m.1 > 0.0).map(|(a, b)| a / b);
        [
            name.to_string(),
            with.to_string(),
            fmt_opt((total > 0).then(|| with as f64 / total as f64)),
            fmt_opt(mean_with),
            fmt_opt(mean_without),
            fmt_opt(ratio),
        ]
    });
    out.table(
        "documentation_flags.csv",
        ["flag", "models", "fraction", "mean_downloads_with", "mean_downloads_without", "download_ratio"],
        flags,
    )?;
    Ok(())
}
