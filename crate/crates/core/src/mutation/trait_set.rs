use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ingest::ModelRecord;

/// A categorical trait read off a record.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TraitKind {
    License,
    Language,
    /// The pipeline tag.
    Task,
    Library,
    /// Every raw tag `prefix:<value>`, e.g. `dataset:`.
    TagPrefix(String),
}

impl TraitKind {
    /// Kinds holding at most one value per model.
    pub fn is_singleton(&self) -> bool {
        matches!(self, TraitKind::License | TraitKind::Task | TraitKind::Library)
    }

    pub fn name(&self) -> String {
        match self {
            TraitKind::License => "license".into(),
            TraitKind::Language => "language".into(),
            TraitKind::Task => "task".into(),
            TraitKind::Library => "library".into(),
            TraitKind::TagPrefix(p) => format!("tag:{p}"),
        }
    }
}

impl fmt::Display for TraitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for TraitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "license" => TraitKind::License,
            "language" | "languages" => TraitKind::Language,
            "task" | "pipeline_tag" => TraitKind::Task,
            "library" | "library_name" => TraitKind::Library,
            _ => match s.strip_prefix("tag:") {
                Some(p) if !p.is_empty() => TraitKind::TagPrefix(p.to_string()),
                _ => return Err(Error::InvalidInput(format!("unknown trait kind {s:?}"))),
            },
        })
    }
}

/// Values treated as "not documented".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraitOptions {
    pub ignored_values: BTreeSet<String>,
}

impl Default for TraitOptions {
    fn default() -> Self {
        Self { ignored_values: ["unknown", "other"].into_iter().map(String::from).collect() }
    }
}

impl TraitOptions {
    pub fn keep_all() -> Self {
        Self { ignored_values: BTreeSet::new() }
    }
}

/// The values one model holds for one trait kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraitSet {
    kind: TraitKind,
    values: BTreeSet<String>,
}

impl TraitSet {
    pub fn new<I, S>(kind: TraitKind, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let values: BTreeSet<String> = values.into_iter().map(Into::into).collect();
        if values.iter().any(String::is_empty) {
            return Err(Error::InvalidInput(format!("empty {kind} value")));
        }
        if kind.is_singleton() && values.len() > 1 {
            return Err(Error::InvalidInput(format!("{kind} holds at most one value, got {}", values.len())));
        }
        Ok(Self { kind, values })
    }

    pub fn of(record: &ModelRecord, kind: &TraitKind, options: &TraitOptions) -> Self {
        let raw: BTreeSet<String> = match kind {
            TraitKind::License => record.license.iter().cloned().collect(),
            TraitKind::Language => record.languages.clone(),
            TraitKind::Task => record.pipeline_tag.iter().cloned().collect(),
            TraitKind::Library => record.library_name.iter().cloned().collect(),
            TraitKind::TagPrefix(p) => {
                record.raw_tags.iter().filter_map(|t| t.strip_prefix(p.as_str())?.strip_prefix(':')).map(String::from).collect()
            }
        };
        let values = raw.into_iter().filter(|v| !v.is_empty() && !options.ignored_values.contains(v)).collect();
        Self { kind: kind.clone(), values }
    }

    pub fn kind(&self) -> &TraitKind {
        &self.kind
    }

    pub fn values(&self) -> &BTreeSet<String> {
        &self.values
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};

    #[test]
    fn singleton_cardinality_enforced() {
        assert!(TraitSet::new(TraitKind::License, ["mit", "apache-2.0"]).is_err());
        assert!(TraitSet::new(TraitKind::Language, ["en", "fr"]).is_ok());
        assert!(TraitSet::new(TraitKind::Language, [""]).is_err());
    }

    #[test]
    fn read_from_record() {
        let r = ModelRecord::builder("m", Utc.with_ymd_and_hms(2023, 1, 1, 0, 0, 0).unwrap())
            .tags(["license:other", "en", "dataset:squad", "dataset:glue"])
            .pipeline_tag("text-generation")
            .build();
        assert!(TraitSet::of(&r, &TraitKind::License, &TraitOptions::default()).is_empty());
        assert_eq!(TraitSet::of(&r, &TraitKind::License, &TraitOptions::keep_all()).values().len(), 1);
        let ds = TraitSet::of(&r, &"tag:dataset".parse().unwrap(), &TraitOptions::default());
        assert_eq!(ds.values().iter().collect::<Vec<_>>(), ["glue", "squad"]);
        assert_eq!(TraitSet::of(&r, &TraitKind::Task, &TraitOptions::default()).values().len(), 1);
    }
}
