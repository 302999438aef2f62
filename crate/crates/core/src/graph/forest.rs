use log::debug;

use super::family::{FamilyGraph, NodeId};
use crate::error::{Error, Result};
use crate::ingest::RelationKind;

/// Finetune-only restriction of a [`FamilyGraph`] in which every node keeps
/// at most one parent: the first finetune parent it declared. Node ids are
/// shared with the graph.
#[derive(Debug, Clone)]
pub struct FinetuneForest {
    parent: Vec<Option<NodeId>>,
    children: Vec<Vec<NodeId>>,
    roots: Vec<NodeId>,
    external: Vec<bool>,
    /// Nodes that declared more than one finetune parent.
    pub multi_parent_nodes: usize,
}

impl FinetuneForest {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.0 < self.parent.len()
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        self.parent[node.0]
    }

    /// Children sorted by node id.
    pub fn children(&self, node: NodeId) -> &[NodeId] {
        &self.children[node.0]
    }

    /// Out-degree.
    pub fn n_succ(&self, node: NodeId) -> usize {
        self.children[node.0].len()
    }

    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn is_external(&self, node: NodeId) -> bool {
        self.external[node.0]
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> {
        (0..self.parent.len()).map(NodeId)
    }

    /// `(parent, child)` pairs ordered by child id.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.parent.iter().enumerate().filter_map(|(c, p)| p.map(|p| (p, NodeId(c))))
    }

    pub fn edge_count(&self) -> usize {
        self.parent.iter().filter(|p| p.is_some()).count()
    }

    pub fn root_of(&self, mut node: NodeId) -> NodeId {
        while let Some(p) = self.parent[node.0] {
            node = p;
        }
        node
    }

    /// Members of the tree containing `node`, in breadth-first order from its root.
    pub fn tree(&self, node: NodeId) -> Vec<NodeId> {
        let root = self.root_of(node);
        let mut out = vec![root];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&self.children[out[i].0]);
            i += 1;
        }
        out
    }

    /// Generation of every node (roots are 0).
    pub fn generations(&self) -> Vec<usize> {
        let mut gen = vec![0; self.len()];
        for &root in &self.roots {
            let mut stack = vec![root];
            while let Some(n) = stack.pop() {
                for &c in &self.children[n.0] {
                    gen[c.0] = gen[n.0] + 1;
                    stack.push(c);
                }
            }
        }
        gen
    }

    /// Build directly from a parent array. Panics if it contains a cycle.
    pub fn from_parents(parent: Vec<Option<NodeId>>) -> Self {
        let external = vec![false; parent.len()];
        Self::assemble(parent, external, 0)
    }

    fn assemble(parent: Vec<Option<NodeId>>, external: Vec<bool>, multi_parent_nodes: usize) -> Self {
        let mut children = vec![Vec::new(); parent.len()];
        let mut roots = Vec::new();
        for (c, p) in parent.iter().enumerate() {
            match p {
                Some(p) => children[p.0].push(NodeId(c)),
                None => roots.push(NodeId(c)),
            }
        }
        let forest = Self { parent, children, roots, external, multi_parent_nodes };
        let reachable: usize = forest.roots.iter().map(|&r| forest.tree(r).len()).sum();
        assert_eq!(reachable, forest.len(), "parent array contains a cycle");
        forest
    }
}

/// Restrict a family graph to finetune edges, keeping each node's
/// first-listed finetune parent.
pub fn finetune_forest(graph: &FamilyGraph) -> FinetuneForest {
    let mut multi = 0;
    let parent: Vec<Option<NodeId>> = graph
        .nodes()
        .map(|n| {
            let mut ps = graph.predecessors(n, RelationKind::Finetune);
            let first = ps.next();
            if ps.next().is_some() {
                debug!("{} has several finetune parents; keeping the first", graph.model_id(n));
                multi += 1;
            }
            first
        })
        .collect();
    let external = graph.nodes().map(|n| graph.is_external(n)).collect();
    FinetuneForest::assemble(parent, external, multi)
}

/// Depth of `node` in its tree.
pub fn generation(forest: &FinetuneForest, node: NodeId) -> Result<usize> {
    if !forest.contains(node) {
        return Err(Error::NotFound(node.to_string()));
    }
    let mut depth = 0;
    let mut cur = node;
    while let Some(p) = forest.parent(cur) {
        depth += 1;
        cur = p;
    }
    Ok(depth)
}
