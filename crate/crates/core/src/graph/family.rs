use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::Write;

use log::warn;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::error::Result;
use crate::ingest::{ModelRecord, RelationKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub model_id: String,
    /// Named as a parent but absent from the snapshot.
    pub external: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub parent: NodeId,
    pub child: NodeId,
    pub kind: RelationKind,
    /// Position of the declaration in the child's parent list.
    pub rank: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub external_nodes: usize,
    pub duplicate_records: usize,
    pub self_loops: Vec<String>,
    /// `(parent, child, kind)` of every edge removed to break a cycle.
    pub dropped_cycle_edges: Vec<(String, String, RelationKind)>,
}

/// Typed lineage DAG over a snapshot.
///
/// Nodes `0..records().len()` are the snapshot records in model-id order;
/// external placeholders follow, also in model-id order. Immutable once built.
#[derive(Debug, Clone)]
pub struct FamilyGraph {
    nodes: Vec<Node>,
    records: Vec<ModelRecord>,
    index: HashMap<String, NodeId>,
    edges: Vec<Edge>,
    parent_edges: Vec<Vec<usize>>,
    child_edges: Vec<Vec<usize>>,
    report: BuildReport,
}

impl FamilyGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn model_id(&self, id: NodeId) -> &str {
        &self.nodes[id.0].model_id
    }

    pub fn lookup(&self, model_id: &str) -> Option<NodeId> {
        self.index.get(model_id).copied()
    }

    pub fn is_external(&self, id: NodeId) -> bool {
        self.nodes[id.0].external
    }

    /// The snapshot record behind a node; `None` for external placeholders.
    pub fn record(&self, id: NodeId) -> Option<&ModelRecord> {
        self.records.get(id.0)
    }

    pub fn records(&self) -> &[ModelRecord] {
        &self.records
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Incoming edges of `id`, in declaration order.
    pub fn parent_edges(&self, id: NodeId) -> impl Iterator<Item = &Edge> {
        self.parent_edges[id.0].iter().map(|&e| &self.edges[e])
    }

    pub fn child_edges(&self, id: NodeId) -> impl Iterator<Item = &Edge> {
        self.child_edges[id.0].iter().map(|&e| &self.edges[e])
    }

    pub fn successors(&self, id: NodeId, kind: RelationKind) -> impl Iterator<Item = NodeId> + '_ {
        self.child_edges(id).filter(move |e| e.kind == kind).map(|e| e.child)
    }

    pub fn predecessors(&self, id: NodeId, kind: RelationKind) -> impl Iterator<Item = NodeId> + '_ {
        self.parent_edges(id).filter(move |e| e.kind == kind).map(|e| e.parent)
    }

    pub fn report(&self) -> &BuildReport {
        &self.report
    }

    /// Weakly connected components over all edge kinds, each sorted by node
    /// id, listed in order of their smallest member.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut uf = UnionFind::new(self.nodes.len());
        for e in &self.edges {
            uf.union(e.parent.0, e.child.0);
        }
        let mut slot: HashMap<usize, usize> = HashMap::new();
        let mut out: Vec<Vec<NodeId>> = Vec::new();
        for n in 0..self.nodes.len() {
            let root = uf.find(n);
            let i = *slot.entry(root).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[i].push(NodeId(n));
        }
        out
    }

    /// Write `parent,child,kind` rows (model ids) with a header line.
    pub fn write_edge_list<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["parent", "child", "kind"])?;
        for e in &self.edges {
            w.write_record([self.model_id(e.parent), self.model_id(e.child), e.kind.as_str()])?;
        }
        w.flush()?;
        Ok(())
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Build the lineage graph.
///
/// One edge per declared `(parent, kind)`. Parents missing from the snapshot
/// become external placeholder nodes. Self-declarations are dropped. Cycles
/// are broken first within each relation kind and then across kinds: inside
/// every non-trivial strongly connected component the edge whose child has
/// the smallest model id (then smallest parent id) is dropped, repeating
/// until the graph is acyclic. Every anomaly lands in [`BuildReport`].
pub fn build_family_graph(mut records: Vec<ModelRecord>) -> FamilyGraph {
    let mut report = BuildReport::default();
    records.sort_by(|a, b| a.model_id.cmp(&b.model_id));
    let before = records.len();
    records.dedup_by(|b, a| a.model_id == b.model_id);
    report.duplicate_records = before - records.len();

    let mut nodes: Vec<Node> = records.iter().map(|r| Node { model_id: r.model_id.clone(), external: false }).collect();
    let mut index: HashMap<String, NodeId> = nodes.iter().enumerate().map(|(i, n)| (n.model_id.clone(), NodeId(i))).collect();

    let mut external: Vec<&str> =
        records.iter().flat_map(|r| r.parent_relations.iter().map(|p| p.parent_id.as_str())).filter(|p| !index.contains_key(*p)).collect();
    external.sort_unstable();
    external.dedup();
    report.external_nodes = external.len();
    for id in external {
        index.insert(id.to_string(), NodeId(nodes.len()));
        nodes.push(Node { model_id: id.to_string(), external: true });
    }

    let mut edges = Vec::new();
    for (child, r) in records.iter().enumerate() {
        for (rank, rel) in r.parent_relations.iter().enumerate() {
            if rel.parent_id == r.model_id {
                warn!("{} declares itself as {} parent; dropped", r.model_id, rel.kind);
                report.self_loops.push(r.model_id.clone());
                continue;
            }
            edges.push(Edge { parent: index[&rel.parent_id], child: NodeId(child), kind: rel.kind, rank });
        }
    }

    for kind in RelationKind::ALL {
        break_cycles(&nodes, &mut edges, Some(kind), &mut report);
    }
    break_cycles(&nodes, &mut edges, None, &mut report);

    let mut parent_edges = vec![Vec::new(); nodes.len()];
    let mut child_edges = vec![Vec::new(); nodes.len()];
    for (i, e) in edges.iter().enumerate() {
        parent_edges[e.child.0].push(i);
        child_edges[e.parent.0].push(i);
    }
    for list in &mut parent_edges {
        list.sort_by_key(|&i| edges[i].rank);
    }

    FamilyGraph { nodes, records, index, edges, parent_edges, child_edges, report }
}

fn break_cycles(nodes: &[Node], edges: &mut Vec<Edge>, kind: Option<RelationKind>, report: &mut BuildReport) {
    loop {
        let mut g: DiGraph<(), usize> = DiGraph::with_capacity(nodes.len(), edges.len());
        for _ in nodes {
            g.add_node(());
        }
        for (i, e) in edges.iter().enumerate() {
            if kind.is_none_or(|k| e.kind == k) {
                g.add_edge(NodeIndex::new(e.parent.0), NodeIndex::new(e.child.0), i);
            }
        }
        let mut drop: Vec<usize> = Vec::new();
        for scc in tarjan_scc(&g) {
            if scc.len() < 2 {
                continue;
            }
            let members: HashSet<usize> = scc.iter().map(|n| n.index()).collect();
            let victim = g
                .edge_weights()
                .copied()
                .filter(|&i| members.contains(&edges[i].parent.0) && members.contains(&edges[i].child.0))
                .min_by(|&a, &b| {
                    let key = |i: usize| (&nodes[edges[i].child.0].model_id, &nodes[edges[i].parent.0].model_id, edges[i].kind);
                    key(a).cmp(&key(b))
                })
                .expect("a non-trivial SCC contains an edge");
            drop.push(victim);
        }
        if drop.is_empty() {
            return;
        }
        drop.sort_unstable();
        for &i in drop.iter().rev() {
            let e = edges.remove(i);
            let (p, c) = (&nodes[e.parent.0].model_id, &nodes[e.child.0].model_id);
            warn!("dropping {} edge {p} -> {c} to break a cycle", e.kind);
            report.dropped_cycle_edges.push((p.clone(), c.clone(), e.kind));
        }
    }
}
