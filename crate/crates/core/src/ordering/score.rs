use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mutation::DriftGraph;
use crate::scalar::Scalar;

/// What a solver maximizes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Number of oriented drift edges pointing forward.
    DriftAgreement,
    /// Event mass on forward-pointing pairs.
    #[default]
    MutationAgreement,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::DriftAgreement => "drift-agreement",
            Objective::MutationAgreement => "mutation-agreement",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drift" | "drift-agreement" => Ok(Objective::DriftAgreement),
            "mutation" | "mutation-agreement" => Ok(Objective::MutationAgreement),
            _ => Err(Error::InvalidInput(format!("unknown objective {s:?}"))),
        }
    }
}

/// How a tied drift edge (equal traffic both ways) counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieRule {
    /// By its stored orientation, like any other edge.
    #[default]
    Oriented,
    /// Never counts as following the order, in either direction.
    NeitherDirection,
}

impl FromStr for TieRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oriented" => Ok(TieRule::Oriented),
            "neither" | "neither-direction" => Ok(TieRule::NeitherDirection),
            _ => Err(Error::InvalidInput(format!("unknown tie rule {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub objective: Objective,
    pub tie_rule: TieRule,
    /// Largest node count `solve_exact` accepts.
    pub exact_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { objective: Objective::default(), tie_rule: TieRule::default(), exact_cap: super::DEFAULT_EXACT_CAP }
    }
}

/// Agreement of one ordering with a drift graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Agreement<T> {
    pub drift_agreement: T,
    pub mutation_agreement: T,
    pub drifts_following: u64,
    pub drifts_total: u64,
    pub mutations_following: u64,
    pub mutations_total: u64,
}

fn fraction<T: Scalar>(num: u64, den: u64) -> T {
    // an empty graph is vacuously in order
    if den == 0 {
        T::one()
    } else {
        T::ratio(num, den)
    }
}

/// Pairwise gain matrix: `w[i][j]` is earned when `i` precedes `j`.
pub(crate) fn weights(graph: &DriftGraph, objective: Objective, tie_rule: TieRule) -> Vec<Vec<u64>> {
    let n = graph.len();
    let mut w = vec![vec![0u64; n]; n];
    match objective {
        Objective::MutationAgreement => {
            for (i, row) in w.iter_mut().enumerate() {
                for (j, x) in row.iter_mut().enumerate() {
                    if i != j {
                        *x = graph.traffic(i, j);
                    }
                }
            }
        }
        Objective::DriftAgreement => {
            for e in graph.edges() {
                if !(e.tie && tie_rule == TieRule::NeitherDirection) {
                    w[e.source][e.target] = 1;
                }
            }
        }
    }
    w
}

/// Position of every node index, checking `permutation` is a bijection.
fn positions<S: AsRef<str>>(graph: &DriftGraph, permutation: &[S]) -> Result<Vec<usize>> {
    if permutation.len() != graph.len() {
        return Err(Error::InvalidInput(format!("permutation has {} values, graph has {}", permutation.len(), graph.len())));
    }
    let mut pos = vec![usize::MAX; graph.len()];
    for (at, v) in permutation.iter().enumerate() {
        let v = v.as_ref();
        let i = graph.index_of(v).ok_or_else(|| Error::InvalidInput(format!("{v:?} is not a drift-graph value")))?;
        if pos[i] != usize::MAX {
            return Err(Error::InvalidInput(format!("{v:?} appears twice")));
        }
        pos[i] = at;
    }
    Ok(pos)
}

pub fn score_ordering<T: Scalar, S: AsRef<str>>(graph: &DriftGraph, permutation: &[S]) -> Result<Agreement<T>> {
    score_ordering_with(graph, permutation, TieRule::default())
}

pub fn score_ordering_with<T: Scalar, S: AsRef<str>>(graph: &DriftGraph, permutation: &[S], tie_rule: TieRule) -> Result<Agreement<T>> {
    let pos = positions(graph, permutation)?;
    Ok(score_positions(graph, &pos, tie_rule))
}

pub(crate) fn score_positions<T: Scalar>(graph: &DriftGraph, pos: &[usize], tie_rule: TieRule) -> Agreement<T> {
    let drifts_following =
        graph.edges().iter().filter(|e| pos[e.source] < pos[e.target] && !(e.tie && tie_rule == TieRule::NeitherDirection)).count() as u64;
    let drifts_total = graph.edges().len() as u64;
    let n = graph.len();
    let mut mutations_following = 0;
    for i in 0..n {
        for j in 0..n {
            if i != j && pos[i] < pos[j] {
                mutations_following += graph.traffic(i, j);
            }
        }
    }
    let mutations_total = graph.retained_events();
    Agreement {
        drift_agreement: fraction(drifts_following, drifts_total),
        mutation_agreement: fraction(mutations_following, mutations_total),
        drifts_following,
        drifts_total,
        mutations_following,
        mutations_total,
    }
}

/// An ordering of drift-graph values with its agreement figures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingResult {
    /// Values, first to last.
    pub permutation: Vec<String>,
    pub objective: Objective,
    pub tie_rule: TieRule,
    /// Value of the objective in integer units (edges or events).
    pub objective_value: u64,
    pub agreement: Agreement<f64>,
    pub optimal: bool,
    pub solver: &'static str,
    #[serde(skip)]
    pub runtime: Duration,
}

impl OrderingResult {
    pub(crate) fn from_order(
        graph: &DriftGraph,
        order: &[usize],
        options: &SolveOptions,
        optimal: bool,
        solver: &'static str,
        runtime: Duration,
    ) -> Self {
        let mut pos = vec![0; order.len()];
        for (at, &i) in order.iter().enumerate() {
            pos[i] = at;
        }
        let w = weights(graph, options.objective, options.tie_rule);
        Self {
            permutation: order.iter().map(|&i| graph.nodes()[i].clone()).collect(),
            objective: options.objective,
            tie_rule: options.tie_rule,
            objective_value: order_value(&w, order),
            agreement: score_positions(graph, &pos, options.tie_rule),
            optimal,
            solver,
            runtime,
        }
    }

    /// Agreement recomputed in another scalar type.
    pub fn agreement_as<T: Scalar>(&self) -> Agreement<T> {
        let a = &self.agreement;
        Agreement {
            drift_agreement: fraction(a.drifts_following, a.drifts_total),
            mutation_agreement: fraction(a.mutations_following, a.mutations_total),
            drifts_following: a.drifts_following,
            drifts_total: a.drifts_total,
            mutations_following: a.mutations_following,
            mutations_total: a.mutations_total,
        }
    }
}

pub(crate) fn order_value(w: &[Vec<u64>], order: &[usize]) -> u64 {
    let mut total = 0;
    for (a, &i) in order.iter().enumerate() {
        for &j in &order[a + 1..] {
            total += w[i][j];
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mutation::TraitKind;
    use num_rational::Ratio;

    fn pair(ab: u64, ba: u64) -> DriftGraph {
        DriftGraph::from_traffic(TraitKind::License, vec!["A".into(), "B".into()], vec![vec![0, ab], vec![ba, 0]])
    }

    #[test]
    fn forward_and_backward() {
        let g = pair(1, 0);
        let a = score_ordering::<f64, _>(&g, &["A", "B"]).unwrap();
        assert_eq!((a.drift_agreement, a.mutation_agreement), (1.0, 1.0));

        let g = pair(10, 2);
        let a = score_ordering::<Ratio<i64>, _>(&g, &["B", "A"]).unwrap();
        assert_eq!(a.drift_agreement, Ratio::from_integer(0));
        assert_eq!(a.mutation_agreement, Ratio::new(2, 12));
    }

    #[test]
    fn ties_under_both_rules() {
        let g = pair(5, 5);
        let fwd = score_ordering_with::<f64, _>(&g, &["A", "B"], TieRule::Oriented).unwrap();
        assert_eq!(fwd.drift_agreement, 1.0);
        for order in [["A", "B"], ["B", "A"]] {
            let a = score_ordering_with::<f64, _>(&g, &order, TieRule::NeitherDirection).unwrap();
            assert_eq!(a.drift_agreement, 0.0);
            assert_eq!(a.mutation_agreement, 0.5);
        }
    }

    #[test]
    fn rejects_bad_permutations() {
        let g = pair(1, 0);
        assert!(score_ordering::<f64, _>(&g, &["A"]).is_err());
        assert!(score_ordering::<f64, _>(&g, &["A", "A"]).is_err());
        assert!(score_ordering::<f64, _>(&g, &["A", "C"]).is_err());
    }
}
