use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{FamilyGraph, NodeId};
use crate::scalar::FloatScalar;
use crate::similarity::{
    build_vector_space_with, levenshtein_similarity_capped, IdfMode, NgramMode, TermVector, DEFAULT_MAX_CHARS, DEFAULT_VOCABULARY_CAP,
};

/// A similarity between two graph nodes. `None` means the pair cannot be
/// scored, e.g. one side has no text.
pub trait PairMetric<T>: Sync {
    fn id(&self) -> String;

    fn similarity(&self, a: NodeId, b: NodeId) -> Option<T>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Levenshtein,
    Bow,
    Tfidf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TextSource {
    /// The canonical metadata string.
    Metadata,
    /// The model card; models without one are unscorable.
    Card,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [MetricKind::Levenshtein, MetricKind::Bow, MetricKind::Tfidf];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::Levenshtein => "levenshtein",
            MetricKind::Bow => "bow",
            MetricKind::Tfidf => "tfidf",
        }
    }
}

impl TextSource {
    pub fn as_str(self) -> &'static str {
        match self {
            TextSource::Metadata => "metadata",
            TextSource::Card => "card",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for TextSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricKind::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| Error::InvalidInput(format!("unknown metric {s:?}")))
    }
}

impl FromStr for TextSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "metadata" => Ok(TextSource::Metadata),
            "card" => Ok(TextSource::Card),
            _ => Err(Error::InvalidInput(format!("unknown text source {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricOptions {
    pub vocabulary_cap: usize,
    pub ngrams: NgramMode,
    pub idf: IdfMode,
    pub max_chars: usize,
}

impl Default for MetricOptions {
    fn default() -> Self {
        Self { vocabulary_cap: DEFAULT_VOCABULARY_CAP, ngrams: NgramMode::Both, idf: IdfMode::Literal, max_chars: DEFAULT_MAX_CHARS }
    }
}

enum Prepared<T> {
    Text(Vec<Option<String>>),
    Vectors(Vec<Option<TermVector<T>>>),
}

/// A text metric evaluated on node metadata or cards. Vectors are computed
/// once per node; the vector space is built from every available text of the
/// chosen source.
pub struct TextMetric<T> {
    kind: MetricKind,
    source: TextSource,
    options: MetricOptions,
    prepared: Prepared<T>,
}

impl<T: FloatScalar> TextMetric<T> {
    pub fn new(graph: &FamilyGraph, kind: MetricKind, source: TextSource, options: MetricOptions) -> Result<Self> {
        let texts: Vec<Option<&str>> = graph
            .nodes()
            .map(|n| {
                graph.record(n).and_then(|r| match source {
                    TextSource::Metadata => Some(r.metadata_string.as_str()),
                    TextSource::Card => r.card_text.as_deref(),
                })
            })
            .collect();
        let prepared = match kind {
            MetricKind::Levenshtein => Prepared::Text(texts.iter().map(|t| t.map(str::to_owned)).collect()),
            MetricKind::Bow | MetricKind::Tfidf => {
                let corpus: Vec<&str> = texts.iter().flatten().copied().collect();
                let space = build_vector_space_with(&corpus, options.vocabulary_cap, options.ngrams)?;
                Prepared::Vectors(
                    texts
                        .par_iter()
                        .map(|t| {
                            t.map(|t| match kind {
                                MetricKind::Bow => space.tf_vector(t),
                                _ => space.tfidf_vector(t, options.idf),
                            })
                        })
                        .collect(),
                )
            }
        };
        Ok(Self { kind, source, options, prepared })
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn source(&self) -> TextSource {
        self.source
    }
}

impl<T: FloatScalar> PairMetric<T> for TextMetric<T> {
    fn id(&self) -> String {
        format!("{}-{}", self.kind, self.source)
    }

    fn similarity(&self, a: NodeId, b: NodeId) -> Option<T> {
        match &self.prepared {
            Prepared::Text(t) => {
                let (x, y) = (t.get(a.index())?.as_deref()?, t.get(b.index())?.as_deref()?);
                Some(levenshtein_similarity_capped::<T>(x, y, self.options.max_chars).value)
            }
            Prepared::Vectors(v) => {
                let (x, y) = (v.get(a.index())?.as_ref()?, v.get(b.index())?.as_ref()?);
                Some(x.cosine(y).value)
            }
        }
    }
}
