//! Command orchestration: each `cmd_*` loads the snapshot, runs one analysis
//! and writes CSV tables plus a manifest into the output directory.

mod analyses;
pub mod cache;
pub mod config;
mod fetch;
pub mod output;
mod summary;

use std::path::PathBuf;

use log::info;

pub use analyses::{cmd_cards, cmd_drift, cmd_graphstats, cmd_similarity, ReferenceStats, REFERENCE_STATS};
pub use config::{MetricSpec, RunConfig, SelectionMode};
pub use fetch::{checkpoint_path, cmd_fetch, FetchOutcome, FetchRequest};
pub use output::{Manifest, OutputSet};
pub use summary::cmd_summary;

use crate::error::Result;
use crate::graph::{build_family_graph, finetune_forest, FamilyGraph, FinetuneForest};
use crate::ingest::{attach_cards, CardStore, ParseOptions, ParseReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// What a finished command leaves behind.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: PathBuf,
    pub warnings: Vec<String>,
}

/// A loaded snapshot with its graphs.
pub struct Session {
    pub graph: FamilyGraph,
    pub forest: FinetuneForest,
    pub parse: ParseReport,
    pub digest: String,
    pub cards_attached: usize,
}

impl Session {
    pub fn open(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let opts = ParseOptions { max_malformed_fraction: config.max_malformed_fraction };
        let (snapshot, digest) = cache::load_snapshot(&config.snapshot, &opts, config.cache_dir.as_deref())?;
        let mut records = snapshot.records;
        let cards_attached = match &config.cards {
            Some(path) => attach_cards(&mut records, &CardStore::open(path).load_all()?),
            None => 0,
        };
        let graph = build_family_graph(records);
        let forest = finetune_forest(&graph);
        info!("{} models, {} nodes, {} forest edges", graph.records().len(), graph.len(), forest.edge_count());
        Ok(Self { graph, forest, parse: snapshot.report, digest, cards_attached })
    }

    /// An output set pre-filled with the ingest counts and warnings.
    pub fn outputs(&self, config: &RunConfig, command: &str) -> Result<OutputSet> {
        let mut out = OutputSet::new(config, command, &self.digest)?;
        let r = self.graph.report();
        out.count("models", self.graph.records().len() as u64);
        out.count("nodes", self.graph.len() as u64);
        out.count("external_nodes", r.external_nodes as u64);
        out.count("forest_edges", self.forest.edge_count() as u64);
        out.count("malformed_lines", self.parse.malformed as u64);
        out.count("duplicate_records", self.parse.duplicates as u64);
        if config.cards.is_some() {
            out.count("cards_attached", self.cards_attached as u64);
        }
        if self.parse.malformed > 0 {
            out.warn(format!("skipped {} malformed of {} lines", self.parse.malformed, self.parse.lines));
        }
        if !r.dropped_cycle_edges.is_empty() {
            out.warn(format!("dropped {} edges to break declared cycles", r.dropped_cycle_edges.len()));
        }
        if !r.self_loops.is_empty() {
            out.warn(format!("ignored {} self-referencing parent declarations", r.self_loops.len()));
        }
        Ok(out)
    }
}

fn finish(out: OutputSet) -> Result<RunOutcome> {
    let warnings = out.warnings().to_vec();
    Ok(RunOutcome { manifest: out.finish()?, warnings })
}
