use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use super::pattern::{Instance, SubtreePattern};
use crate::error::{Error, Result};
use crate::graph::{FinetuneForest, NodeId};

/// Where an occurrence of a pattern is anchored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Anchor {
    /// The whole node universe (random pairs).
    Universe,
    Node(NodeId),
    /// A forest edge `(parent, child)`.
    Edge(NodeId, NodeId),
}

/// Which nodes a random pair may be drawn from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairUniverse {
    /// Every forest node, singletons included.
    #[default]
    AllNodes,
    /// Only nodes in trees of two or more nodes.
    FamilyMembers,
}

impl std::str::FromStr for PairUniverse {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" | "all-nodes" => Ok(PairUniverse::AllNodes),
            "family" | "family-members" => Ok(PairUniverse::FamilyMembers),
            _ => Err(Error::InvalidInput(format!("unknown pair universe {s:?}"))),
        }
    }
}

/// Every anchor meeting a pattern's condition, with the number of pattern
/// occurrences it anchors.
#[derive(Debug, Clone)]
pub struct PatternSiteTable<'f> {
    forest: &'f FinetuneForest,
    pattern: SubtreePattern,
    entries: Vec<(Anchor, u128)>,
    cumulative: Vec<u128>,
    universe: Vec<NodeId>,
}

fn choose2(n: usize) -> u128 {
    let n = n as u128;
    if n < 2 {
        0
    } else {
        n * (n - 1) / 2
    }
}

fn choose3(n: usize) -> u128 {
    let n = n as u128;
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Closed-form site table for `pattern`.
///
/// | pattern         | anchor            | condition                          | multiplicity                 |
/// |-----------------|-------------------|------------------------------------|------------------------------|
/// | random pair     | universe          | at least two nodes                 | C(N, 2)                      |
/// | edge            | edge (u, v)       | always                             | 1                            |
/// | sibling fork    | node u            | n_succ(u) >= 2                     | C(n_succ(u), 2)              |
/// | chain 3         | edge (u, v)       | n_succ(v) >= 1                     | n_succ(v)                    |
/// | triple fork     | node u            | n_succ(u) >= 3                     | C(n_succ(u), 3)              |
/// | fork under edge | edge (u, v)       | n_succ(v) >= 2                     | C(n_succ(v), 2)              |
/// | uncle fork      | edge (u, v)       | n_succ(u) >= 2, n_succ(v) >= 1     | n_succ(v) * (n_succ(u) - 1)  |
/// | chain 4         | edge (u, v)       | u has a parent, n_succ(v) >= 1     | n_succ(v)                    |
pub fn enumerate_sites(forest: &FinetuneForest, pattern: SubtreePattern) -> PatternSiteTable<'_> {
    enumerate_sites_with(forest, pattern, PairUniverse::AllNodes)
}

pub fn enumerate_sites_with(forest: &FinetuneForest, pattern: SubtreePattern, universe: PairUniverse) -> PatternSiteTable<'_> {
    let mut universe_nodes = Vec::new();
    let entries: Vec<(Anchor, u128)> = match pattern {
        SubtreePattern::RandomPair => {
            universe_nodes = match universe {
                PairUniverse::AllNodes => forest.nodes().collect(),
                PairUniverse::FamilyMembers => forest.nodes().filter(|&n| forest.parent(n).is_some() || forest.n_succ(n) > 0).collect(),
            };
            let m = choose2(universe_nodes.len());
            if m > 0 {
                vec![(Anchor::Universe, m)]
            } else {
                Vec::new()
            }
        }
        SubtreePattern::SiblingFork | SubtreePattern::TripleFork => {
            let f = if pattern == SubtreePattern::SiblingFork { choose2 } else { choose3 };
            (0..forest.len())
                .into_par_iter()
                .filter_map(|i| {
                    let m = f(forest.n_succ(NodeId(i)));
                    (m > 0).then_some((Anchor::Node(NodeId(i)), m))
                })
                .collect()
        }
        _ => {
            let edges: Vec<(NodeId, NodeId)> = forest.edges().collect();
            edges
                .into_par_iter()
                .filter_map(|(u, v)| {
                    let (su, sv) = (forest.n_succ(u) as u128, forest.n_succ(v));
                    let m = match pattern {
                        SubtreePattern::Edge => 1,
                        SubtreePattern::Chain3 => sv as u128,
                        SubtreePattern::ForkUnderEdge => choose2(sv),
                        SubtreePattern::UncleFork => sv as u128 * (su - 1),
                        SubtreePattern::Chain4 => {
                            if forest.parent(u).is_some() {
                                sv as u128
                            } else {
                                0
                            }
                        }
                        _ => unreachable!(),
                    };
                    (m > 0).then_some((Anchor::Edge(u, v), m))
                })
                .collect()
        }
    };
    let mut acc = 0u128;
    let cumulative = entries
        .iter()
        .map(|e| {
            acc += e.1;
            acc
        })
        .collect();
    PatternSiteTable { forest, pattern, entries, cumulative, universe: universe_nodes }
}

impl<'f> PatternSiteTable<'f> {
    pub fn pattern(&self) -> SubtreePattern {
        self.pattern
    }

    pub fn forest(&self) -> &'f FinetuneForest {
        self.forest
    }

    pub fn entries(&self) -> &[(Anchor, u128)] {
        &self.entries
    }

    pub fn total_count(&self) -> u128 {
        self.cumulative.last().copied().unwrap_or(0)
    }

    /// Draw one occurrence: an anchor with probability proportional to its
    /// multiplicity, then a uniform realization within it.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Instance> {
        let total = self.total_count();
        if total == 0 {
            return Err(Error::NoSites);
        }
        let r = rng.random_range(0..total);
        let slot = self.cumulative.partition_point(|&c| c <= r);
        Ok(self.realize(self.entries[slot].0, rng))
    }

    fn realize<R: Rng + ?Sized>(&self, anchor: Anchor, rng: &mut R) -> Instance {
        let f = self.forest;
        let pick = |rng: &mut R, v: NodeId| {
            let kids = f.children(v);
            kids[rng.random_range(0..kids.len())]
        };
        let distinct = |rng: &mut R, v: NodeId, k: usize| -> Vec<NodeId> {
            let kids = f.children(v);
            index::sample(rng, kids.len(), k).into_iter().map(|i| kids[i]).collect()
        };
        let p = self.pattern;
        match (p, anchor) {
            (SubtreePattern::RandomPair, Anchor::Universe) => {
                let n = self.universe.len();
                let i = rng.random_range(0..n);
                let mut j = rng.random_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                Instance::new(p, &[self.universe[i], self.universe[j]])
            }
            (SubtreePattern::Edge, Anchor::Edge(u, v)) => Instance::new(p, &[u, v]),
            (SubtreePattern::SiblingFork, Anchor::Node(u)) => {
                let c = distinct(rng, u, 2);
                Instance::new(p, &[u, c[0], c[1]])
            }
            (SubtreePattern::TripleFork, Anchor::Node(u)) => {
                let c = distinct(rng, u, 3);
                Instance::new(p, &[u, c[0], c[1], c[2]])
            }
            (SubtreePattern::Chain3, Anchor::Edge(u, v)) => Instance::new(p, &[u, v, pick(rng, v)]),
            (SubtreePattern::ForkUnderEdge, Anchor::Edge(u, v)) => {
                let c = distinct(rng, v, 2);
                Instance::new(p, &[u, v, c[0], c[1]])
            }
            (SubtreePattern::UncleFork, Anchor::Edge(u, v)) => {
                let siblings = f.children(u);
                let at = siblings.iter().position(|&s| s == v).expect("edge child is a child");
                let mut k = rng.random_range(0..siblings.len() - 1);
                if k >= at {
                    k += 1;
                }
                Instance::new(p, &[u, siblings[k], v, pick(rng, v)])
            }
            (SubtreePattern::Chain4, Anchor::Edge(u, v)) => {
                let gp = f.parent(u).expect("chain4 anchor has a grandparent");
                Instance::new(p, &[gp, u, v, pick(rng, v)])
            }
            _ => unreachable!("anchor {anchor:?} does not belong to {p}"),
        }
    }
}
