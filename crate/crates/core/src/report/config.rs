use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mutation::DEFAULT_TOP_K;
use crate::ordering::{Objective, TieRule, DEFAULT_EXACT_CAP};
use crate::sampling::{MetricKind, PairUniverse, TextSource, DEFAULT_SAMPLE_SIZE};
use crate::similarity::{IdfMode, NgramMode, DEFAULT_MAX_CHARS, DEFAULT_VOCABULARY_CAP};

/// A text metric applied to one text source, written `kind-source`
/// (e.g. `tfidf-metadata`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MetricSpec {
    pub kind: MetricKind,
    pub source: TextSource,
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.kind, self.source)
    }
}

impl FromStr for MetricSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, source) = s.split_once('-').unwrap_or((s, "metadata"));
        Ok(Self { kind: kind.parse()?, source: source.parse()? })
    }
}

impl Serialize for MetricSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMode {
    #[default]
    Traffic,
    Frequency,
}

impl FromStr for SelectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "traffic" => Ok(SelectionMode::Traffic),
            "frequency" => Ok(SelectionMode::Frequency),
            _ => Err(Error::InvalidInput(format!("unknown node selection {s:?}"))),
        }
    }
}

/// Everything that determines a run's outputs. Serialized verbatim into
/// every output file, minus the output and cache locations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub snapshot: PathBuf,
    pub cards: Option<PathBuf>,
    #[serde(skip)]
    pub output_dir: PathBuf,
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub vocabulary_cap: usize,
    pub sample_size: usize,
    pub top_k: usize,
    /// Rows in the summary distribution tables.
    pub top_n: usize,
    pub exact_cap: usize,
    pub metrics: Vec<MetricSpec>,
    pub objective: Objective,
    pub tie_rule: TieRule,
    pub pair_universe: PairUniverse,
    pub idf: IdfMode,
    pub ngrams: NgramMode,
    pub node_selection: SelectionMode,
    pub max_chars: usize,
    pub max_malformed_fraction: f64,
    /// CSV with columns `arxiv_id,category`, one row per category.
    pub arxiv_categories: Option<PathBuf>,
    /// Add the published full-registry figures to drift summaries.
    pub reference: bool,
}

impl RunConfig {
    pub fn new(snapshot: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            snapshot: snapshot.into(),
            cards: None,
            output_dir: output_dir.into(),
            cache_dir: None,
            seed: None,
            vocabulary_cap: DEFAULT_VOCABULARY_CAP,
            sample_size: DEFAULT_SAMPLE_SIZE,
            top_k: DEFAULT_TOP_K,
            top_n: 10,
            exact_cap: DEFAULT_EXACT_CAP,
            metrics: MetricKind::ALL.into_iter().map(|kind| MetricSpec { kind, source: TextSource::Metadata }).collect(),
            objective: Objective::default(),
            tie_rule: TieRule::default(),
            pair_universe: PairUniverse::default(),
            idf: IdfMode::default(),
            ngrams: NgramMode::default(),
            node_selection: SelectionMode::default(),
            max_chars: DEFAULT_MAX_CHARS,
            max_malformed_fraction: 0.10,
            arxiv_categories: None,
            reference: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("vocabulary cap", self.vocabulary_cap),
            ("sample size", self.sample_size),
            ("top-k", self.top_k),
            ("top-n", self.top_n),
            ("exact cap", self.exact_cap),
            ("max chars", self.max_chars),
        ];
        if let Some((name, _)) = positive.iter().find(|p| p.1 == 0) {
            return Err(Error::Config(format!("{name} must be positive")));
        }
        if self.seed == Some(0) {
            return Err(Error::Config("seed must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.max_malformed_fraction) {
            return Err(Error::Config("malformed fraction must lie in [0, 1]".into()));
        }
        if self.metrics.is_empty() {
            return Err(Error::Config("select at least one metric".into()));
        }
        if !self.snapshot.is_file() {
            return Err(Error::Config(format!("snapshot {} is not a readable file", self.snapshot.display())));
        }
        if let Some(c) = &self.cards {
            if !c.exists() {
                return Err(Error::Config(format!("card store {} does not exist", c.display())));
            }
        }
        Ok(())
    }

    /// The seed sampling commands need.
    pub fn require_seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| Error::Config("--seed is required for sampling commands".into()))
    }

    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
