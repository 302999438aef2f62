use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::rate::MutationEvent;
use super::trait_set::TraitKind;

pub const DEFAULT_TOP_K: usize = 20;

/// How the retained drift-graph nodes are chosen.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum NodeSelection {
    /// Values taking part in the most events.
    #[default]
    Traffic,
    /// Values held by the most models, counts supplied by the caller.
    Frequency(BTreeMap<String, u64>),
}

/// One majority-oriented edge between two retained values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DriftEdge {
    pub source: usize,
    pub target: usize,
    /// Events in both directions.
    pub weight: u64,
    /// Majority count minus minority count.
    pub margin: u64,
    /// Equal traffic both ways; oriented from the lexicographically smaller value.
    pub tie: bool,
}

/// Oriented graph of the most common trait mutations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DriftGraph {
    kind: TraitKind,
    nodes: Vec<String>,
    traffic: Vec<Vec<u64>>,
    edges: Vec<DriftEdge>,
    total_events: u64,
}

pub fn build_drift_graph(kind: TraitKind, events: &[MutationEvent], k: usize) -> DriftGraph {
    build_drift_graph_with(kind, events, k, &NodeSelection::Traffic)
}

pub fn build_drift_graph_with(kind: TraitKind, events: &[MutationEvent], k: usize, selection: &NodeSelection) -> DriftGraph {
    let mut pair_counts: HashMap<(&str, &str), u64> = HashMap::new();
    let mut participation: HashMap<&str, u64> = HashMap::new();
    for e in events {
        *pair_counts.entry((&e.from, &e.to)).or_default() += 1;
        *participation.entry(&e.from).or_default() += 1;
        *participation.entry(&e.to).or_default() += 1;
    }
    let mut ranked: Vec<(&str, u64)> = match selection {
        NodeSelection::Traffic => participation.into_iter().collect(),
        NodeSelection::Frequency(freq) => participation.into_keys().map(|v| (v, freq.get(v).copied().unwrap_or(0))).collect(),
    };
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(k);
    let mut nodes: Vec<String> = ranked.into_iter().map(|(v, _)| v.to_string()).collect();
    nodes.sort_unstable();

    let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let n = nodes.len();
    let mut traffic = vec![vec![0u64; n]; n];
    for ((f, t), c) in pair_counts {
        if let (Some(&i), Some(&j)) = (index.get(f), index.get(t)) {
            traffic[i][j] += c;
        }
    }
    oriented(kind, nodes, traffic, events.len() as u64)
}

/// Orient every pair of values with traffic; `nodes` must be sorted.
#[allow(clippy::needless_range_loop)]
fn oriented(kind: TraitKind, nodes: Vec<String>, traffic: Vec<Vec<u64>>, total_events: u64) -> DriftGraph {
    let n = nodes.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (fwd, back) = (traffic[i][j], traffic[j][i]);
            if fwd + back == 0 {
                continue;
            }
            // i is the lexicographically smaller value
            let (source, target) = if back > fwd { (j, i) } else { (i, j) };
            edges.push(DriftEdge { source, target, weight: fwd + back, margin: fwd.abs_diff(back), tie: fwd == back });
        }
    }
    DriftGraph { kind, nodes, traffic, edges, total_events }
}

impl DriftGraph {
    pub fn kind(&self) -> &TraitKind {
        &self.kind
    }

    /// Retained values, sorted.
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, value: &str) -> Option<usize> {
        self.nodes.binary_search_by(|v| v.as_str().cmp(value)).ok()
    }

    /// Events `i -> j` between retained values.
    pub fn traffic(&self, i: usize, j: usize) -> u64 {
        self.traffic[i][j]
    }

    pub fn edges(&self) -> &[DriftEdge] {
        &self.edges
    }

    /// Events among retained values.
    pub fn retained_events(&self) -> u64 {
        self.traffic.iter().flatten().sum()
    }

    /// Every event passed in, retained or not.
    pub fn total_events(&self) -> u64 {
        self.total_events
    }

    /// Build a graph from a traffic matrix, `traffic[i][j]` counting
    /// events `nodes[i] -> nodes[j]`. Diagonal entries are ignored.
    pub fn from_traffic(kind: TraitKind, nodes: Vec<String>, traffic: Vec<Vec<u64>>) -> Self {
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by(|&a, &b| nodes[a].cmp(&nodes[b]));
        let t: Vec<Vec<u64>> = order.iter().map(|&i| order.iter().map(|&j| if i == j { 0 } else { traffic[i][j] }).collect()).collect();
        let total = t.iter().flatten().sum();
        let sorted = order.iter().map(|&i| nodes[i].clone()).collect();
        oriented(kind, sorted, t, total)
    }
}
