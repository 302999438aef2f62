use chrono::{DateTime, Utc};

use super::family::{FamilyGraph, NodeId};
use super::forest::FinetuneForest;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Mean undirected distance over all unordered node pairs of the tree
/// containing `node`.
///
/// Each edge separating a subtree of size `s` from the rest of an `n`-node
/// tree lies on `s * (n - s)` pair paths, so the pairwise distance sum is
/// accumulated edge by edge in linear time.
pub fn structural_virality<T: Scalar>(forest: &FinetuneForest, node: NodeId) -> Result<T> {
    if !forest.contains(node) {
        return Err(Error::NotFound(node.to_string()));
    }
    let order = forest.tree(node);
    let n = order.len() as u64;
    if n < 2 {
        return Err(Error::UndefinedInput(format!("structural virality needs at least 2 nodes; tree of {node} is a singleton")));
    }
    let mut size: std::collections::HashMap<NodeId, u64> = std::collections::HashMap::with_capacity(order.len());
    let mut total: u128 = 0;
    for &v in order.iter().rev() {
        let s = 1 + forest.children(v).iter().map(|c| size[c]).sum::<u64>();
        size.insert(v, s);
        if forest.parent(v).is_some() {
            total += u128::from(s) * u128::from(n - s);
        }
    }
    let pairs = n * (n - 1) / 2;
    let total = u64::try_from(total).expect("distance sum overflows u64");
    Ok(T::ratio(total, pairs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeStats<T> {
    pub root: NodeId,
    pub size: usize,
    pub max_depth: usize,
    pub mean_depth: T,
    /// `None` for singleton trees.
    pub virality: Option<T>,
}

/// Size, depth and virality of every tree, ordered by root id.
pub fn depth_stats<T: Scalar>(forest: &FinetuneForest) -> Vec<TreeStats<T>> {
    let gens = forest.generations();
    forest
        .roots()
        .iter()
        .map(|&root| {
            let members = forest.tree(root);
            let depth_sum: u64 = members.iter().map(|m| gens[m.0] as u64).sum();
            let max_depth = members.iter().map(|m| gens[m.0]).max().unwrap_or(0);
            TreeStats {
                root,
                size: members.len(),
                max_depth,
                mean_depth: T::ratio(depth_sum, members.len() as u64),
                virality: (members.len() >= 2).then(|| structural_virality(forest, root).expect("non-singleton tree")),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthPoint {
    pub at: DateTime<Utc>,
    pub cumulative: usize,
    /// The timestamp is the registry backfill date and predates real tracking.
    pub backfilled: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthSeries {
    pub points: Vec<GrowthPoint>,
    pub any_backfilled: bool,
    /// Members without a snapshot record (external placeholders), not counted.
    pub skipped_external: usize,
}

/// Cumulative member count of a graph component at each distinct creation
/// timestamp. `component` indexes [`FamilyGraph::components`].
pub fn component_growth(graph: &FamilyGraph, component: usize) -> Result<GrowthSeries> {
    let components = graph.components();
    let members = components.get(component).ok_or_else(|| Error::NotFound(format!("component {component}")))?;
    Ok(growth_of(graph, members))
}

/// Growth curve over an explicit member list.
pub fn growth_of(graph: &FamilyGraph, members: &[NodeId]) -> GrowthSeries {
    let mut stamps: Vec<(DateTime<Utc>, bool)> = Vec::with_capacity(members.len());
    let mut skipped_external = 0;
    for &m in members {
        match graph.record(m) {
            Some(r) => stamps.push((r.created_at, r.created_at_backfilled)),
            None => skipped_external += 1,
        }
    }
    stamps.sort();
    let mut points: Vec<GrowthPoint> = Vec::new();
    for (i, (at, backfilled)) in stamps.iter().enumerate() {
        match points.last_mut() {
            Some(p) if p.at == *at => {
                p.cumulative = i + 1;
                p.backfilled |= backfilled;
            }
            _ => points.push(GrowthPoint { at: *at, cumulative: i + 1, backfilled: *backfilled }),
        }
    }
    GrowthSeries { any_backfilled: points.iter().any(|p| p.backfilled), points, skipped_external }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_family_graph;
    use crate::ingest::ModelRecord;
    use chrono::TimeZone;
    use num_rational::Ratio;

    fn path(n: usize) -> FinetuneForest {
        FinetuneForest::from_parents((0..n).map(|i| i.checked_sub(1).map(NodeId)).collect())
    }

    fn star(leaves: usize) -> FinetuneForest {
        FinetuneForest::from_parents((0..=leaves).map(|i| (i > 0).then_some(NodeId(0))).collect())
    }

    #[test]
    fn small_virality_values() {
        assert_eq!(structural_virality::<f64>(&path(2), NodeId(0)).unwrap(), 1.0);
        assert_eq!(structural_virality::<Ratio<i64>>(&path(3), NodeId(2)).unwrap(), Ratio::new(4, 3));
        assert_eq!(structural_virality::<Ratio<i64>>(&star(3), NodeId(1)).unwrap(), Ratio::new(3, 2));
        assert_eq!(structural_virality::<f64>(&path(5), NodeId(0)).unwrap(), 2.0);
    }

    #[test]
    fn singleton_virality_is_undefined() {
        let f = FinetuneForest::from_parents(vec![None]);
        assert!(matches!(structural_virality::<f64>(&f, NodeId(0)), Err(Error::UndefinedInput(_))));
    }

    #[test]
    fn depth_stats_for_path_star_and_singleton() {
        let p = depth_stats::<f64>(&path(5));
        assert_eq!((p[0].size, p[0].max_depth, p[0].mean_depth), (5, 4, 2.0));
        let s = depth_stats::<f64>(&star(4));
        assert_eq!((s[0].max_depth, s[0].mean_depth), (1, 0.8));
        let single = depth_stats::<f64>(&FinetuneForest::from_parents(vec![None]));
        assert_eq!(single[0], TreeStats { root: NodeId(0), size: 1, max_depth: 0, mean_depth: 0.0, virality: None });
    }

    fn rec(id: &str, y: i32, m: u32, d: u32, tags: &[&str]) -> ModelRecord {
        ModelRecord::builder(id, Utc.with_ymd_and_hms(y, m, d, 0, 0, 0).unwrap()).tags(tags.iter().copied()).build()
    }

    #[test]
    fn growth_counts_each_distinct_day() {
        let g = build_family_graph(vec![
            rec("a", 2024, 1, 1, &[]),
            rec("b", 2024, 1, 2, &["base_model:finetune:a"]),
            rec("c", 2024, 1, 3, &["base_model:finetune:b"]),
        ]);
        let s = component_growth(&g, 0).unwrap();
        let counts: Vec<_> = s.points.iter().map(|p| p.cumulative).collect();
        assert_eq!(counts, [1, 2, 3]);
        assert!(!s.any_backfilled);
    }

    #[test]
    fn backfilled_component_is_a_single_flagged_step() {
        let g = build_family_graph(vec![
            rec("a", 2022, 3, 2, &[]),
            rec("b", 2022, 3, 2, &["base_model:finetune:a"]),
            rec("c", 2022, 3, 2, &["base_model:adapter:a"]),
        ]);
        let s = component_growth(&g, 0).unwrap();
        assert_eq!(s.points.len(), 1);
        assert_eq!(s.points[0].cumulative, 3);
        assert!(s.any_backfilled && s.points[0].backfilled);
        assert!(component_growth(&g, 1).is_err());
    }
}
