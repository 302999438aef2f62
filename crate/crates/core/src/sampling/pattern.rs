use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::graph::NodeId;

/// The eight family-subtree shapes over which similarity is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SubtreePattern {
    /// Two arbitrary nodes.
    RandomPair,
    /// parent -> child
    Edge,
    /// parent -> {c1, c2}
    SiblingFork,
    /// gp -> p -> c
    Chain3,
    /// parent -> {c1, c2, c3}
    TripleFork,
    /// gp -> p -> {c1, c2}
    ForkUnderEdge,
    /// gp -> {uncle, p}, p -> c
    UncleFork,
    /// ggp -> gp -> p -> c
    Chain4,
}

/// A named position inside a pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    A,
    B,
    GreatGrandparent,
    Grandparent,
    Uncle,
    Parent,
    Child,
    Child1,
    Child2,
    Child3,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::A => "a",
            Role::B => "b",
            Role::GreatGrandparent => "ggp",
            Role::Grandparent => "gp",
            Role::Uncle => "uncle",
            Role::Parent => "p",
            Role::Child => "c",
            Role::Child1 => "c1",
            Role::Child2 => "c2",
            Role::Child3 => "c3",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl SubtreePattern {
    pub const ALL: [SubtreePattern; 8] = [
        SubtreePattern::RandomPair,
        SubtreePattern::Edge,
        SubtreePattern::SiblingFork,
        SubtreePattern::Chain3,
        SubtreePattern::TripleFork,
        SubtreePattern::ForkUnderEdge,
        SubtreePattern::UncleFork,
        SubtreePattern::Chain4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SubtreePattern::RandomPair => "random_pair",
            SubtreePattern::Edge => "edge",
            SubtreePattern::SiblingFork => "sibling_fork",
            SubtreePattern::Chain3 => "chain3",
            SubtreePattern::TripleFork => "triple_fork",
            SubtreePattern::ForkUnderEdge => "fork_under_edge",
            SubtreePattern::UncleFork => "uncle_fork",
            SubtreePattern::Chain4 => "chain4",
        }
    }

    /// Positions in the order used by [`Instance::nodes`].
    pub fn positions(self) -> &'static [Role] {
        use Role::*;
        match self {
            SubtreePattern::RandomPair => &[A, B],
            SubtreePattern::Edge => &[Parent, Child],
            SubtreePattern::SiblingFork => &[Parent, Child1, Child2],
            SubtreePattern::Chain3 => &[Grandparent, Parent, Child],
            SubtreePattern::TripleFork => &[Parent, Child1, Child2, Child3],
            SubtreePattern::ForkUnderEdge => &[Grandparent, Parent, Child1, Child2],
            SubtreePattern::UncleFork => &[Grandparent, Uncle, Parent, Child],
            SubtreePattern::Chain4 => &[GreatGrandparent, Grandparent, Parent, Child],
        }
    }

    pub fn size(self) -> usize {
        self.positions().len()
    }

    /// Every unordered pair of positions, in position order.
    pub fn role_pairs(self) -> Vec<(Role, Role)> {
        let pos = self.positions();
        let mut out = Vec::new();
        for i in 0..pos.len() {
            for j in i + 1..pos.len() {
                out.push((pos[i], pos[j]));
            }
        }
        out
    }

    pub fn position_of(self, role: Role) -> Option<usize> {
        self.positions().iter().position(|&r| r == role)
    }
}

impl fmt::Display for SubtreePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for SubtreePattern {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl Serialize for Role {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        use Role::*;
        [A, B, GreatGrandparent, Grandparent, Uncle, Parent, Child, Child1, Child2, Child3]
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown role {s:?}")))
    }
}

impl FromStr for SubtreePattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SubtreePattern::ALL.into_iter().find(|p| p.as_str() == s).ok_or_else(|| Error::InvalidInput(format!("unknown pattern {s:?}")))
    }
}

/// One concrete occurrence of a pattern; `nodes[i]` fills `positions()[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Instance {
    pub pattern: SubtreePattern,
    nodes: [NodeId; 4],
}

impl Instance {
    pub(crate) fn new(pattern: SubtreePattern, nodes: &[NodeId]) -> Self {
        debug_assert_eq!(nodes.len(), pattern.size());
        let mut buf = [NodeId(usize::MAX); 4];
        buf[..nodes.len()].copy_from_slice(nodes);
        Self { pattern, nodes: buf }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes[..self.pattern.size()]
    }

    pub fn get(&self, role: Role) -> Option<NodeId> {
        self.pattern.position_of(role).map(|i| self.nodes[i])
    }
}
