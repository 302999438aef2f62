//! Trait mutation rates, directional mutation events and drift graphs.

mod drift;
mod rate;
mod trait_set;

pub use drift::{build_drift_graph, build_drift_graph_with, DriftEdge, DriftGraph, NodeSelection, DEFAULT_TOP_K};
pub use rate::{aggregate_mutation_rate, collect_events, directional_events, edge_mutation_rate, MutationEvent, MutationSummary};
pub use trait_set::{TraitKind, TraitOptions, TraitSet};
