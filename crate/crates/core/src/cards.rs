//! Model card analytics: coverage, lengths, parent to child length change
//! and auto-generation markers.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{FamilyGraph, FinetuneForest};
use crate::ingest::{ModelRecord, RelationKind};
use crate::scalar::Scalar;

/// Card length in Unicode scalar values.
pub fn card_length(text: &str) -> u64 {
    text.chars().count() as u64
}

/// Whitespace-delimited tokens.
pub fn word_count(text: &str) -> u64 {
    text.split_whitespace().count() as u64
}

/// Fraction of records with a card. Zero for no records.
pub fn card_coverage<T: Scalar>(records: &[ModelRecord]) -> T {
    if records.is_empty() {
        return T::zero();
    }
    let with = records.iter().filter(|r| r.card_text.is_some()).count() as u64;
    T::ratio(with, records.len() as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthStats<T> {
    pub cards: u64,
    pub mean: T,
    pub median: T,
    pub min: u64,
    pub max: u64,
    pub mean_words: T,
    pub median_words: T,
}

fn median<T: Scalar>(sorted: &[u64]) -> T {
    let n = sorted.len();
    if n % 2 == 1 {
        T::from_count(sorted[n / 2])
    } else {
        (T::from_count(sorted[n / 2 - 1]) + T::from_count(sorted[n / 2])) / T::from_count(2)
    }
}

/// Length statistics over the cards that are present.
pub fn length_stats<T: Scalar>(records: &[ModelRecord]) -> Result<LengthStats<T>> {
    let (mut chars, mut words): (Vec<u64>, Vec<u64>) =
        records.par_iter().filter_map(|r| r.card_text.as_deref()).map(|t| (card_length(t), word_count(t))).unzip();
    if chars.is_empty() {
        return Err(Error::NoData("no model cards present".into()));
    }
    chars.sort_unstable();
    words.sort_unstable();
    let n = T::from_count(chars.len() as u64);
    Ok(LengthStats {
        cards: chars.len() as u64,
        mean: T::from_count(chars.iter().sum()) / n.clone(),
        median: median(&chars),
        min: chars[0],
        max: chars[chars.len() - 1],
        mean_words: T::from_count(words.iter().sum()) / n,
        median_words: median(&words),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationLength<T> {
    pub generation: usize,
    pub cards: u64,
    pub mean_length: T,
}

/// Mean card length per finetune generation, generations without cards
/// omitted.
pub fn generation_lengths<T: Scalar>(graph: &FamilyGraph, forest: &FinetuneForest) -> Vec<GenerationLength<T>> {
    let gens = forest.generations();
    let mut acc: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
    for node in graph.nodes() {
        if let Some(text) = graph.record(node).and_then(|r| r.card_text.as_deref()) {
            let e = acc.entry(gens[node.index()]).or_default();
            e.0 += 1;
            e.1 += card_length(text);
        }
    }
    acc.into_iter()
        .map(|(generation, (cards, total))| GenerationLength { generation, cards, mean_length: T::ratio(total, cards) })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthDelta<T> {
    /// Mean of parent length minus child length.
    pub mean: T,
    pub edges: u64,
}

/// Mean signed length drop over finetune edges where both cards exist.
pub fn parent_child_delta<T: Scalar>(graph: &FamilyGraph, forest: &FinetuneForest) -> Result<LengthDelta<T>> {
    let len = |n| graph.record(n).and_then(|r| r.card_text.as_deref()).map(card_length);
    let (mut edges, mut parents, mut children) = (0u64, 0u64, 0u64);
    for (u, v) in forest.edges() {
        if let (Some(p), Some(c)) = (len(u), len(v)) {
            edges += 1;
            parents += p;
            children += c;
        }
    }
    if edges == 0 {
        return Err(Error::NoData("no finetune edge with both cards present".into()));
    }
    Ok(LengthDelta { mean: (T::from_count(parents) - T::from_count(children)) / T::from_count(edges), edges })
}

const MARKERS: [&str; 2] = ["automatically generated", "generated automatically"];

/// Case-insensitive search for either marker bigram after collapsing runs
/// of whitespace.
pub fn is_autogenerated(text: &str) -> bool {
    let norm = text.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
    MARKERS.iter().any(|m| norm.contains(m))
}

/// Marker prevalence among one group of models.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AutogenRate<T> {
    /// A relation kind name or `root`.
    pub group: String,
    pub cards: u64,
    pub flagged: u64,
    /// `None` when the group has no cards.
    pub fraction: Option<T>,
}

/// Marker rates for children of each relation kind and for models with no
/// parent. A model with parents of several kinds counts in each group.
pub fn autogen_rate<T: Scalar>(graph: &FamilyGraph) -> Vec<AutogenRate<T>> {
    let mut groups: BTreeMap<&str, (u64, u64)> = RelationKind::ALL.iter().map(|k| (k.as_str(), (0, 0))).collect();
    groups.insert("root", (0, 0));
    for node in graph.nodes() {
        let Some(text) = graph.record(node).and_then(|r| r.card_text.as_deref()) else {
            continue;
        };
        let flagged = u64::from(is_autogenerated(text));
        let mut kinds: Vec<&str> = graph.parent_edges(node).map(|e| e.kind.as_str()).collect();
        kinds.sort_unstable();
        kinds.dedup();
        if kinds.is_empty() {
            kinds.push("root");
        }
        for k in kinds {
            let g = groups.get_mut(k).expect("known group");
            g.0 += 1;
            g.1 += flagged;
        }
    }
    let order = RelationKind::ALL.iter().map(|k| k.as_str()).chain(["root"]);
    order
        .map(|g| {
            let (cards, flagged) = groups[g];
            AutogenRate { group: g.to_string(), cards, flagged, fraction: (cards > 0).then(|| T::ratio(flagged, cards)) }
        })
        .collect()
}

/// Everything the cards report shows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CardStats<T> {
    pub coverage: T,
    pub lengths: Option<LengthStats<T>>,
    pub generations: Vec<GenerationLength<T>>,
    pub delta: Option<LengthDelta<T>>,
    pub autogen: Vec<AutogenRate<T>>,
}

pub fn card_stats<T: Scalar>(graph: &FamilyGraph, forest: &FinetuneForest) -> CardStats<T> {
    CardStats {
        coverage: card_coverage(graph.records()),
        lengths: length_stats(graph.records()).ok(),
        generations: generation_lengths(graph, forest),
        delta: parent_child_delta(graph, forest).ok(),
        autogen: autogen_rate(graph),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_family_graph, finetune_forest};
    use chrono::{TimeZone, Utc};
    use num_rational::Ratio;

    fn rec(id: &str, parent: Option<(&str, &str)>, card: Option<&str>) -> ModelRecord {
        let mut b = ModelRecord::builder(id, Utc.with_ymd_and_hms(2023, 1, 1, 0, 0, 0).unwrap());
        if let Some((kind, p)) = parent {
            b = b.tag(format!("base_model:{kind}:{p}"));
        }
        if let Some(c) = card {
            b = b.card(c);
        }
        b.build()
    }

    #[test]
    fn coverage_and_lengths() {
        let recs = vec![
            rec("a", None, Some(&"x".repeat(10))),
            rec("b", None, Some(&"x".repeat(90))),
            rec("c", None, Some(&"é".repeat(20))),
            rec("d", None, None),
        ];
        assert_eq!(card_coverage::<Ratio<i64>>(&recs), Ratio::new(3, 4));
        let s = length_stats::<Ratio<i64>>(&recs).unwrap();
        assert_eq!((s.mean, s.median, s.min, s.max), (Ratio::from_integer(40), Ratio::from_integer(20), 10, 90));
        assert!(length_stats::<f64>(&recs[3..]).is_err());
        assert_eq!(card_coverage::<f64>(&recs[3..]), 0.0);
    }

    #[test]
    fn markers() {
        assert!(is_autogenerated("This card was Automatically Generated."));
        assert!(is_autogenerated("generated\n\t automatically by a tool"));
        assert!(!is_autogenerated("generated, automatically"));
        assert!(!is_autogenerated("automatic generation"));
    }

    #[test]
    fn delta_and_groups() {
        let recs = vec![
            rec("p", None, Some(&"a".repeat(6000))),
            rec("c", Some(("finetune", "p")), Some(&"a".repeat(1000))),
            rec("q", Some(("adapter", "p")), Some("automatically generated")),
            rec("z", Some(("quantized", "p")), Some("hand written")),
        ];
        let g = build_family_graph(recs);
        let f = finetune_forest(&g);
        let d = parent_child_delta::<f64>(&g, &f).unwrap();
        assert_eq!((d.mean, d.edges), (5000.0, 1));
        let rates = autogen_rate::<f64>(&g);
        let by: BTreeMap<_, _> = rates.iter().map(|r| (r.group.as_str(), r.fraction)).collect();
        assert_eq!(by["adapter"], Some(1.0));
        assert_eq!(by["finetune"], Some(0.0));
        assert_eq!(by["quantized"], Some(0.0));
        assert_eq!(by["merge"], None);
        assert_eq!(by["root"], Some(0.0));

        let gens = generation_lengths::<f64>(&g, &f);
        assert_eq!(gens[0].generation, 0);
        assert_eq!(gens[1].mean_length, 1000.0);
    }
}
