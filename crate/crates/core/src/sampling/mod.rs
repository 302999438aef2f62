//! Weighted sampling of node pairs from family-subtree patterns.

mod estimate;
mod metric;
mod pattern;
mod sites;

pub use estimate::{
    draw_rng, estimate_from_table, estimate_similarity, estimate_similarity_with, sample_pairs, EstimateOptions, SimilarityEstimate,
    DEFAULT_SAMPLE_SIZE, MAX_RESAMPLES_PER_DRAW,
};
pub use metric::{MetricKind, MetricOptions, PairMetric, TextMetric, TextSource};
pub use pattern::{Instance, Role, SubtreePattern};
pub use sites::{enumerate_sites, enumerate_sites_with, Anchor, PairUniverse, PatternSiteTable};
