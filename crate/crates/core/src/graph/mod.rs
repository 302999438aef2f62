//! Lineage graph construction and tree statistics.

mod family;
mod forest;
mod stats;

pub use family::{build_family_graph, BuildReport, Edge, FamilyGraph, Node, NodeId};
pub use forest::{finetune_forest, generation, FinetuneForest};
pub use stats::{component_growth, depth_stats, growth_of, structural_virality, GrowthPoint, GrowthSeries, TreeStats};
