use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use super::dna::canonical_metadata_string;
use super::traits::extract_traits;
use crate::error::Error;

/// Date the registry stamped onto every model that predates creation tracking.
pub const BACKFILL_DATE: NaiveDate = match NaiveDate::from_ymd_opt(2022, 3, 2) {
    Some(d) => d,
    None => unreachable!(),
};

/// How a derivative model declares its relation to a parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Finetune,
    Quantized,
    Adapter,
    Merge,
}

impl RelationKind {
    pub const ALL: [RelationKind; 4] = [RelationKind::Finetune, RelationKind::Quantized, RelationKind::Adapter, RelationKind::Merge];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationKind::Finetune => "finetune",
            RelationKind::Quantized => "quantized",
            RelationKind::Adapter => "adapter",
            RelationKind::Merge => "merge",
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "finetune" => Ok(RelationKind::Finetune),
            "quantized" => Ok(RelationKind::Quantized),
            "adapter" => Ok(RelationKind::Adapter),
            "merge" => Ok(RelationKind::Merge),
            other => Err(Error::InvalidInput(format!("unknown relation kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParentRelation {
    pub parent_id: String,
    pub kind: RelationKind,
}

/// One registry entry.
///
/// `license`, `languages`, `arxiv_ids` and `parent_relations` are derived from
/// `raw_tags`; `metadata_string` and `created_at_backfilled` are derived from
/// everything else. Build records through [`ModelRecord::builder`] so the
/// derived fields stay consistent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub model_id: String,
    pub created_at: DateTime<Utc>,
    pub downloads: u64,
    pub likes: u64,
    pub trending_score: Option<f64>,
    pub pipeline_tag: Option<String>,
    pub library_name: Option<String>,
    pub license: Option<String>,
    pub languages: BTreeSet<String>,
    pub raw_tags: Vec<String>,
    pub parent_relations: Vec<ParentRelation>,
    pub arxiv_ids: BTreeSet<String>,
    pub card_text: Option<String>,
    pub metadata_string: String,
    pub created_at_backfilled: bool,
}

impl ModelRecord {
    pub fn builder(model_id: impl Into<String>, created_at: DateTime<Utc>) -> ModelRecordBuilder {
        ModelRecordBuilder {
            model_id: model_id.into(),
            created_at,
            downloads: 0,
            likes: 0,
            trending_score: None,
            pipeline_tag: None,
            library_name: None,
            tags: Vec::new(),
            card_text: None,
        }
    }

    /// Parents declared with the given relation kind, in declaration order.
    pub fn parents_of_kind(&self, kind: RelationKind) -> impl Iterator<Item = &str> {
        self.parent_relations.iter().filter(move |r| r.kind == kind).map(|r| r.parent_id.as_str())
    }

    /// Recompute the derived fields after mutating the public ones.
    ///
    /// Returns the warnings raised while re-extracting traits from the tags.
    pub fn refresh(&mut self) -> Vec<String> {
        let traits = extract_traits(&self.raw_tags);
        self.license = traits.license;
        self.languages = traits.languages;
        self.arxiv_ids = traits.arxiv_ids;
        self.parent_relations = traits.parent_relations;
        self.created_at_backfilled = self.created_at.date_naive() == BACKFILL_DATE;
        self.metadata_string = canonical_metadata_string(self);
        traits.warnings
    }
}

#[derive(Debug, Clone)]
pub struct ModelRecordBuilder {
    model_id: String,
    created_at: DateTime<Utc>,
    downloads: u64,
    likes: u64,
    trending_score: Option<f64>,
    pipeline_tag: Option<String>,
    library_name: Option<String>,
    tags: Vec<String>,
    card_text: Option<String>,
}

impl ModelRecordBuilder {
    pub fn downloads(mut self, n: u64) -> Self {
        self.downloads = n;
        self
    }

    pub fn likes(mut self, n: u64) -> Self {
        self.likes = n;
        self
    }

    pub fn trending_score(mut self, s: f64) -> Self {
        self.trending_score = Some(s);
        self
    }

    pub fn pipeline_tag(mut self, tag: impl Into<String>) -> Self {
        self.pipeline_tag = Some(tag.into());
        self
    }

    pub fn library_name(mut self, name: impl Into<String>) -> Self {
        self.library_name = Some(name.into());
        self
    }

    pub fn tag(mut self, tag: impl Into<String>) -> Self {
        self.tags.push(tag.into());
        self
    }

    pub fn tags<I, S>(mut self, tags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.tags.extend(tags.into_iter().map(Into::into));
        self
    }

    pub fn card(mut self, text: impl Into<String>) -> Self {
        self.card_text = Some(text.into());
        self
    }

    pub fn build(self) -> ModelRecord {
        self.build_reporting().0
    }

    /// Like [`build`](Self::build), also returning tag-extraction warnings.
    pub fn build_reporting(self) -> (ModelRecord, Vec<String>) {
        let mut record = ModelRecord {
            model_id: self.model_id,
            created_at: self.created_at,
            downloads: self.downloads,
            likes: self.likes,
            trending_score: self.trending_score,
            pipeline_tag: self.pipeline_tag,
            library_name: self.library_name,
            license: None,
            languages: BTreeSet::new(),
            raw_tags: self.tags,
            parent_relations: Vec::new(),
            arxiv_ids: BTreeSet::new(),
            card_text: self.card_text,
            metadata_string: String::new(),
            created_at_backfilled: false,
        };
        let warnings = record.refresh();
        (record, warnings)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    #[test]
    fn backfill_flag_tracks_the_backfill_date() {
        let backfilled = ModelRecord::builder("a/x", Utc.with_ymd_and_hms(2022, 3, 2, 17, 5, 9).unwrap()).build();
        assert!(backfilled.created_at_backfilled);
        let fresh = ModelRecord::builder("a/y", Utc.with_ymd_and_hms(2022, 3, 3, 0, 0, 0).unwrap()).build();
        assert!(!fresh.created_at_backfilled);
    }

    #[test]
    fn relation_kind_round_trips_through_str() {
        for kind in RelationKind::ALL {
            assert_eq!(kind.as_str().parse::<RelationKind>().unwrap(), kind);
        }
        assert!("sibling".parse::<RelationKind>().is_err());
    }
}
