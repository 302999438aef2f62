use rayon::prelude::*;
use serde::Serialize;

use super::trait_set::{TraitKind, TraitOptions, TraitSet};
use crate::error::{Error, Result};
use crate::graph::{FamilyGraph, FinetuneForest, NodeId};
use crate::scalar::Scalar;

fn check_kinds(parent: &TraitSet, child: &TraitSet) -> Result<()> {
    if parent.kind() != child.kind() {
        return Err(Error::InvalidInput(format!("trait kinds differ: {} vs {}", parent.kind(), child.kind())));
    }
    if parent.is_empty() && child.is_empty() {
        return Err(Error::UndefinedInput(format!("both {} sets are empty", parent.kind())));
    }
    Ok(())
}

/// `1 - |P ∩ C| / |P ∪ C|`.
pub fn edge_mutation_rate<T: Scalar>(parent: &TraitSet, child: &TraitSet) -> Result<T> {
    check_kinds(parent, child)?;
    let (p, c) = (parent.values(), child.values());
    let inter = p.intersection(c).count() as u64;
    let union = (p.len() + c.len()) as u64 - inter;
    Ok(T::one() - T::ratio(inter, union))
}

/// A trait value on a parent replaced by a value on its child.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MutationEvent {
    pub from: String,
    pub to: String,
    /// The forest edge `(parent, child)` the event was observed on.
    pub edge: Option<(NodeId, NodeId)>,
}

/// Every dropped parent value points to every child value, and every parent
/// value points to every added child value. A pair produced by both rules
/// appears once. Events come out sorted.
pub fn directional_events(parent: &TraitSet, child: &TraitSet) -> Result<Vec<MutationEvent>> {
    check_kinds(parent, child)?;
    let (p, c) = (parent.values(), child.values());
    let mut pairs: Vec<(&String, &String)> = Vec::new();
    for d in p.difference(c) {
        pairs.extend(c.iter().map(|v| (d, v)));
    }
    for a in c.difference(p) {
        pairs.extend(p.iter().map(|v| (v, a)));
    }
    pairs.sort_unstable();
    pairs.dedup();
    Ok(pairs.into_iter().map(|(f, t)| MutationEvent { from: f.clone(), to: t.clone(), edge: None }).collect())
}

/// Aggregate rate over finetune edges together with how many edges were
/// skipped and why.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MutationSummary<T> {
    pub kind: String,
    pub rate: T,
    /// Edges where both endpoints document the trait.
    pub observed_inheritances: u64,
    /// Usable edges with a nonzero rate.
    pub mutated_edges: u64,
    pub excluded_external: u64,
    pub excluded_one_missing: u64,
    pub excluded_both_missing: u64,
}

enum EdgeUse {
    External,
    OneMissing,
    BothMissing,
    Usable(TraitSet, TraitSet),
}

fn classify(graph: &FamilyGraph, kind: &TraitKind, options: &TraitOptions, u: NodeId, v: NodeId) -> EdgeUse {
    let (Some(pr), Some(cr)) = (graph.record(u), graph.record(v)) else {
        return EdgeUse::External;
    };
    let (p, c) = (TraitSet::of(pr, kind, options), TraitSet::of(cr, kind, options));
    match (p.is_empty(), c.is_empty()) {
        (true, true) => EdgeUse::BothMissing,
        (false, false) => EdgeUse::Usable(p, c),
        _ => EdgeUse::OneMissing,
    }
}

pub fn aggregate_mutation_rate<T: Scalar>(
    graph: &FamilyGraph,
    forest: &FinetuneForest,
    kind: &TraitKind,
    options: &TraitOptions,
) -> Result<MutationSummary<T>> {
    let edges: Vec<(NodeId, NodeId)> = forest.edges().collect();
    // class 0 usable, 1 external, 2 one endpoint missing, 3 both missing
    let per_edge: Vec<(u8, Option<T>)> = edges
        .par_iter()
        .map(|&(u, v)| match classify(graph, kind, options, u, v) {
            EdgeUse::External => (1, None),
            EdgeUse::OneMissing => (2, None),
            EdgeUse::BothMissing => (3, None),
            EdgeUse::Usable(p, c) => (0, Some(edge_mutation_rate::<T>(&p, &c).expect("usable edge"))),
        })
        .collect();
    let mut counts = [0u64; 4];
    let mut mutated = 0u64;
    let mut sum = T::zero();
    for (class, rate) in per_edge {
        counts[class as usize] += 1;
        if let Some(r) = rate {
            if r != T::zero() {
                mutated += 1;
            }
            sum = sum + r;
        }
    }
    if counts[0] == 0 {
        return Err(Error::NoData(format!("no finetune edge where both models document {kind}")));
    }
    Ok(MutationSummary {
        kind: kind.name(),
        rate: sum / T::from_count(counts[0]),
        observed_inheritances: counts[0],
        mutated_edges: mutated,
        excluded_external: counts[1],
        excluded_one_missing: counts[2],
        excluded_both_missing: counts[3],
    })
}

/// Mutation events over every usable finetune edge, tagged with the edge.
pub fn collect_events(graph: &FamilyGraph, forest: &FinetuneForest, kind: &TraitKind, options: &TraitOptions) -> Vec<MutationEvent> {
    let edges: Vec<(NodeId, NodeId)> = forest.edges().collect();
    edges
        .par_iter()
        .flat_map_iter(|&(u, v)| match classify(graph, kind, options, u, v) {
            EdgeUse::Usable(p, c) => {
                let mut ev = directional_events(&p, &c).expect("usable edge");
                for e in &mut ev {
                    e.edge = Some((u, v));
                }
                ev
            }
            _ => Vec::new(),
        })
        .collect()
}
