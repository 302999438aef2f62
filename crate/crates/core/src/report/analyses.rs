use std::collections::BTreeMap;

use rayon::prelude::*;

use super::output::fmt_opt;
use super::{finish, RunConfig, RunOutcome, SelectionMode, Session};
use crate::cards::card_stats;
use crate::error::{Error, Result};
use crate::graph::{depth_stats, growth_of};
use crate::mutation::{aggregate_mutation_rate, build_drift_graph_with, collect_events, NodeSelection, TraitKind, TraitOptions, TraitSet};
use crate::ordering::{solve_exact_with, solve_heuristic_with, SolveOptions};
use crate::sampling::{enumerate_sites_with, estimate_from_table, MetricOptions, PatternSiteTable, SubtreePattern, TextMetric};

/// Seed for the heuristic ordering solver when the run has none.
const DEFAULT_ORDERING_SEED: u64 = 1;

pub fn cmd_similarity(config: &RunConfig) -> Result<RunOutcome> {
    let seed = config.require_seed()?;
    let s = Session::open(config)?;
    let mut out = s.outputs(config, "similarity")?;

    let tables: Vec<PatternSiteTable<'_>> =
        SubtreePattern::ALL.iter().map(|&p| enumerate_sites_with(&s.forest, p, config.pair_universe)).collect();
    out.table(
        "pattern_sites.csv",
        ["pattern", "size", "anchors", "occurrences"],
        tables.iter().map(|t| {
            [t.pattern().as_str().to_owned(), t.pattern().size().to_string(), t.entries().len().to_string(), t.total_count().to_string()]
        }),
    )?;

    let options =
        MetricOptions { vocabulary_cap: config.vocabulary_cap, ngrams: config.ngrams, idf: config.idf, max_chars: config.max_chars };
    let mut rows = Vec::new();
    let mut failures: BTreeMap<String, u64> = BTreeMap::new();
    for spec in &config.metrics {
        let metric = TextMetric::<f64>::new(&s.graph, spec.kind, spec.source, options)?;
        for table in &tables {
            for roles in table.pattern().role_pairs() {
                let (mean, se, resampled, status) = match estimate_from_table(table, roles, &metric, config.sample_size, seed) {
                    Ok(e) => (Some(e.mean), Some(e.standard_error), e.resampled.to_string(), "ok".to_owned()),
                    Err(e @ (Error::NoSites | Error::NoData(_))) => {
                        let status = if matches!(e, Error::NoSites) { "no-sites" } else { "no-data" };
                        *failures.entry(format!("{spec} {}: {e}", table.pattern())).or_default() += 1;
                        (None, None, String::new(), status.to_owned())
                    }
                    Err(e) => return Err(e),
                };
                rows.push([
                    table.pattern().as_str().to_owned(),
                    roles.0.as_str().to_owned(),
                    roles.1.as_str().to_owned(),
                    spec.to_string(),
                    config.sample_size.to_string(),
                    fmt_opt(mean),
                    fmt_opt(se),
                    resampled,
                    seed.to_string(),
                    status,
                ]);
            }
        }
    }
    let estimated = rows.iter().filter(|r| r[9] == "ok").count();
    out.count("estimates", estimated as u64);
    out.count("estimates_failed", (rows.len() - estimated) as u64);
    for (what, n) in failures {
        out.warn(format!("{what} ({n} role pairs without estimate)"));
    }
    out.table(
        "similarity_estimates.csv",
        ["pattern", "role_a", "role_b", "metric", "sample_size", "mean", "standard_error", "resampled", "seed", "status"],
        rows,
    )?;
    finish(out)
}

/// Published full-registry drift figures, in percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceStats {
    pub trait_name: &'static str,
    pub inheritances: u64,
    pub mutation_rate: f64,
    pub drifts_following: u64,
    pub drifts_total: u64,
    pub drift_agreement: f64,
    pub mutation_agreement: f64,
}

pub const REFERENCE_STATS: [ReferenceStats; 3] = [
    ReferenceStats {
        trait_name: "license",
        inheritances: 320_065,
        mutation_rate: 14.98,
        drifts_following: 132,
        drifts_total: 140,
        drift_agreement: 94.29,
        mutation_agreement: 84.26,
    },
    ReferenceStats {
        trait_name: "language",
        inheritances: 115_660,
        mutation_rate: 12.80,
        drifts_following: 186,
        drifts_total: 190,
        drift_agreement: 97.89,
        mutation_agreement: 74.71,
    },
    ReferenceStats {
        trait_name: "task",
        inheritances: 251_060,
        mutation_rate: 23.14,
        drifts_following: 111,
        drifts_total: 121,
        drift_agreement: 91.74,
        mutation_agreement: 95.16,
    },
];

fn file_stem(kind: &TraitKind) -> String {
    kind.name().chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '-' }).collect()
}

fn pct(x: f64) -> String {
    format!("{:.2}", x * 100.0)
}

pub fn cmd_drift(config: &RunConfig, kind: &TraitKind) -> Result<RunOutcome> {
    let s = Session::open(config)?;
    let mut out = s.outputs(config, &format!("drift {kind}"))?;
    let opts = TraitOptions::default();
    let summary = aggregate_mutation_rate::<f64>(&s.graph, &s.forest, kind, &opts)?;
    let events = collect_events(&s.graph, &s.forest, kind, &opts);
    let selection = match config.node_selection {
        SelectionMode::Traffic => NodeSelection::Traffic,
        SelectionMode::Frequency => {
            let mut freq: BTreeMap<String, u64> = BTreeMap::new();
            for r in s.graph.records() {
                for v in TraitSet::of(r, kind, &opts).values() {
                    *freq.entry(v.clone()).or_default() += 1;
                }
            }
            NodeSelection::Frequency(freq)
        }
    };
    let dg = build_drift_graph_with(kind.clone(), &events, config.top_k, &selection);
    if dg.is_empty() {
        return Err(Error::NoData(format!("no {kind} mutations to order")));
    }
    let solve = SolveOptions { objective: config.objective, tie_rule: config.tie_rule, exact_cap: config.exact_cap };
    let result = if dg.len() <= config.exact_cap {
        solve_exact_with(&dg, &solve)?
    } else {
        out.warn(format!("{} values exceed the exact cap of {}; ordering is heuristic", dg.len(), config.exact_cap));
        solve_heuristic_with(&dg, &solve, config.seed.unwrap_or(DEFAULT_ORDERING_SEED))
    };
    out.count("events", dg.total_events());
    out.count("retained_events", dg.retained_events());
    out.count("drift_nodes", dg.len() as u64);
    out.count("drift_edges", dg.edges().len() as u64);

    let stem = file_stem(kind);
    let position: BTreeMap<&str, usize> = result.permutation.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let nodes = dg.nodes();
    out.table(
        &format!("drift_{stem}_edges.csv"),
        ["source", "target", "weight", "margin", "tie", "forward"],
        dg.edges().iter().map(|e| {
            let (a, b) = (&nodes[e.source], &nodes[e.target]);
            [
                a.clone(),
                b.clone(),
                e.weight.to_string(),
                e.margin.to_string(),
                e.tie.to_string(),
                (position[a.as_str()] < position[b.as_str()]).to_string(),
            ]
        }),
    )?;
    out.table(
        &format!("drift_{stem}_ordering.csv"),
        ["rank", "value"],
        result.permutation.iter().enumerate().map(|(i, v)| [(i + 1).to_string(), v.clone()]),
    )?;

    let a = &result.agreement;
    let mut stats: Vec<(&str, String, Option<String>)> = vec![
        ("trait", kind.to_string(), None),
        ("observed_inheritances", summary.observed_inheritances.to_string(), None),
        ("mutated_edges", summary.mutated_edges.to_string(), None),
        ("mutation_rate_pct", pct(summary.rate), None),
        ("ordering", result.permutation.join(" > "), None),
        ("drifts_following", a.drifts_following.to_string(), None),
        ("drifts_total", a.drifts_total.to_string(), None),
        ("drift_agreement_pct", pct(a.drift_agreement), None),
        ("mutations_following", a.mutations_following.to_string(), None),
        ("mutations_total", a.mutations_total.to_string(), None),
        ("mutation_agreement_pct", pct(a.mutation_agreement), None),
        ("objective", result.objective.as_str().to_owned(), None),
        ("objective_value", result.objective_value.to_string(), None),
        ("solver", result.solver.to_owned(), None),
        ("optimal", result.optimal.to_string(), None),
        ("excluded_external", summary.excluded_external.to_string(), None),
        ("excluded_one_missing", summary.excluded_one_missing.to_string(), None),
        ("excluded_both_missing", summary.excluded_both_missing.to_string(), None),
        ("duplicate_events", "counted once".to_owned(), None),
    ];
    let reference = REFERENCE_STATS.iter().find(|r| r.trait_name == kind.name());
    match (config.reference, reference) {
        (true, Some(r)) => {
            let mut matched = 0;
            for (name, value, slot) in stats.iter_mut() {
                let want = match *name {
                    "observed_inheritances" => r.inheritances.to_string(),
                    "mutation_rate_pct" => format!("{:.2}", r.mutation_rate),
                    "drifts_following" => r.drifts_following.to_string(),
                    "drifts_total" => r.drifts_total.to_string(),
                    "drift_agreement_pct" => format!("{:.2}", r.drift_agreement),
                    "mutation_agreement_pct" => format!("{:.2}", r.mutation_agreement),
                    _ => continue,
                };
                matched += u64::from(*value == want);
                *slot = Some(want);
            }
            out.count("reference_matches", matched);
        }
        (true, None) => out.warn(format!("no reference figures for trait {kind}")),
        _ => {}
    }
    let with_reference = config.reference && reference.is_some();
    let header: Vec<&str> = if with_reference { vec!["statistic", "value", "reference", "matches"] } else { vec!["statistic", "value"] };
    out.table(
        &format!("drift_{stem}_summary.csv"),
        header,
        stats.into_iter().map(|(name, value, reference)| {
            let mut row = vec![name.to_owned(), value.clone()];
            if with_reference {
                row.push(reference.clone().unwrap_or_default());
                row.push(reference.map(|r| (r == value).to_string()).unwrap_or_default());
            }
            row
        }),
    )?;
    finish(out)
}

pub fn cmd_graphstats(config: &RunConfig) -> Result<RunOutcome> {
    let s = Session::open(config)?;
    let mut out = s.outputs(config, "graphstats")?;
    let trees = depth_stats::<f64>(&s.forest);
    out.count("trees", trees.len() as u64);
    out.count("singleton_trees", trees.iter().filter(|t| t.size == 1).count() as u64);
    out.table(
        "trees.csv",
        ["root", "size", "max_depth", "mean_depth", "virality", "external_root"],
        trees.iter().map(|t| {
            [
                s.graph.model_id(t.root).to_owned(),
                t.size.to_string(),
                t.max_depth.to_string(),
                t.mean_depth.to_string(),
                fmt_opt(t.virality),
                s.forest.is_external(t.root).to_string(),
            ]
        }),
    )?;

    let mut largest: Vec<_> = trees.iter().filter(|t| t.size > 1).collect();
    largest.sort_by(|a, b| b.size.cmp(&a.size).then(s.graph.model_id(a.root).cmp(s.graph.model_id(b.root))));
    largest.truncate(config.top_n);
    let series: Vec<_> = largest.par_iter().map(|t| (t.root, growth_of(&s.graph, &s.forest.tree(t.root)))).collect();
    if series.iter().any(|(_, g)| g.any_backfilled) {
        out.warn("growth series include backfilled creation dates");
    }
    let graph = &s.graph;
    out.table(
        "growth.csv",
        ["root", "at", "cumulative", "backfilled"],
        series.iter().flat_map(|(root, g)| {
            g.points.iter().map(move |p| {
                [
                    graph.model_id(*root).to_owned(),
                    p.at.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                    p.cumulative.to_string(),
                    p.backfilled.to_string(),
                ]
            })
        }),
    )?;
    finish(out)
}

pub fn cmd_cards(config: &RunConfig) -> Result<RunOutcome> {
    let s = Session::open(config)?;
    let mut out = s.outputs(config, "cards")?;
    let stats = card_stats::<f64>(&s.graph, &s.forest);
    let cards = stats.lengths.as_ref().map_or(0, |l| l.cards);
    out.count("cards", cards);
    if cards == 0 {
        out.warn("no model cards present");
    }
    let l = stats.lengths.as_ref();
    let rows: Vec<(&str, String)> = vec![
        ("models", s.graph.records().len().to_string()),
        ("cards", cards.to_string()),
        ("coverage", stats.coverage.to_string()),
        ("mean_length", fmt_opt(l.map(|l| l.mean))),
        ("median_length", fmt_opt(l.map(|l| l.median))),
        ("min_length", l.map(|l| l.min.to_string()).unwrap_or_default()),
        ("max_length", l.map(|l| l.max.to_string()).unwrap_or_default()),
        ("mean_words", fmt_opt(l.map(|l| l.mean_words))),
        ("median_words", fmt_opt(l.map(|l| l.median_words))),
        ("parent_child_edges", stats.delta.as_ref().map_or(0, |d| d.edges).to_string()),
        ("mean_length_drop", fmt_opt(stats.delta.as_ref().map(|d| d.mean))),
    ];
    out.table("card_summary.csv", ["statistic", "value"], rows.into_iter().map(|(k, v)| [k.to_owned(), v]))?;
    out.table(
        "card_generations.csv",
        ["generation", "cards", "mean_length"],
        stats.generations.iter().map(|g| [g.generation.to_string(), g.cards.to_string(), g.mean_length.to_string()]),
    )?;
    out.table(
        "card_autogen.csv",
        ["group", "cards", "flagged", "fraction"],
        stats.autogen.iter().map(|a| [a.group.clone(), a.cards.to_string(), a.flagged.to_string(), fmt_opt(a.fraction)]),
    )?;
    finish(out)
}
