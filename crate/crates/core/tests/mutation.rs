use chrono::{TimeZone, Utc};
use lineage::graph::{build_family_graph, finetune_forest};
use lineage::ingest::ModelRecord;
use lineage::mutation::*;
use lineage::synthetic::{synthetic_snapshot, SyntheticConfig};
use num_rational::Ratio;
use proptest::prelude::*;

fn at() -> chrono::DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 2, 1, 0, 0, 0).unwrap()
}

fn model(id: &str, parent: Option<&str>, tags: &[&str]) -> ModelRecord {
    let mut b = ModelRecord::builder(id, at()).tags(tags.iter().copied());
    if let Some(p) = parent {
        b = b.tag(format!("base_model:finetune:{p}"));
    }
    b.build()
}

#[test]
fn four_edges_one_mutation() {
    let recs = vec![
        model("r", None, &["license:mit"]),
        model("a", Some("r"), &["license:mit"]),
        model("b", Some("r"), &["license:mit"]),
        model("c", Some("a"), &["license:apache-2.0"]),
        model("d", Some("a"), &["license:mit"]),
        // child without a license: excluded, not a mutation
        model("e", Some("b"), &[]),
    ];
    let g = build_family_graph(recs);
    let f = finetune_forest(&g);
    let s = aggregate_mutation_rate::<Ratio<i64>>(&g, &f, &TraitKind::License, &TraitOptions::default()).unwrap();
    assert_eq!(s.rate, Ratio::new(1, 4));
    assert_eq!((s.observed_inheritances, s.mutated_edges, s.excluded_one_missing), (4, 1, 1));

    let events = collect_events(&g, &f, &TraitKind::License, &TraitOptions::default());
    assert_eq!(events.len(), 1);
    assert_eq!((events[0].from.as_str(), events[0].to.as_str()), ("mit", "apache-2.0"));
}

#[test]
fn identical_traits_zero_rate_and_no_data() {
    let recs = vec![model("r", None, &["en", "fr"]), model("a", Some("r"), &["fr", "en"]), model("x", Some("gone/base"), &["en"])];
    let g = build_family_graph(recs);
    let f = finetune_forest(&g);
    let s = aggregate_mutation_rate::<f64>(&g, &f, &TraitKind::Language, &TraitOptions::default()).unwrap();
    assert_eq!((s.rate, s.observed_inheritances, s.excluded_external), (0.0, 1, 1));
    assert!(matches!(aggregate_mutation_rate::<f64>(&g, &f, &TraitKind::Task, &TraitOptions::default()), Err(lineage::Error::NoData(_))));
}

#[test]
fn drift_graph_on_synthetic_snapshot() {
    let recs = synthetic_snapshot(&SyntheticConfig { models: 3_000, seed: 4, ..Default::default() });
    let g = build_family_graph(recs);
    let f = finetune_forest(&g);
    let events = collect_events(&g, &f, &TraitKind::Language, &TraitOptions::default());
    let dg = build_drift_graph(TraitKind::Language, &events, DEFAULT_TOP_K);
    assert!(dg.len() <= 20);
    assert!(dg.edges().len() <= 20 * 19 / 2);
    let weights: u64 = dg.edges().iter().map(|e| e.weight).sum();
    assert_eq!(weights, dg.retained_events());
    assert_eq!(dg.total_events(), events.len() as u64);
}

fn trait_set(kind: TraitKind) -> impl Strategy<Value = TraitSet> {
    let max = if kind.is_singleton() { 1 } else { 5 };
    proptest::collection::btree_set("[a-f]", 0..=max).prop_map(move |v| TraitSet::new(kind.clone(), v).unwrap())
}

proptest! {
    #[test]
    fn rate_is_symmetric_and_bounded(p in trait_set(TraitKind::Language), c in trait_set(TraitKind::Language)) {
        prop_assume!(!(p.is_empty() && c.is_empty()));
        let pc = edge_mutation_rate::<Ratio<i64>>(&p, &c).unwrap();
        prop_assert_eq!(pc, edge_mutation_rate::<Ratio<i64>>(&c, &p).unwrap());
        prop_assert!(pc >= Ratio::from_integer(0) && pc <= Ratio::from_integer(1));
        prop_assert_eq!(pc == Ratio::from_integer(0), p == c);
    }

    #[test]
    fn singleton_events_at_most_one(p in trait_set(TraitKind::License), c in trait_set(TraitKind::License)) {
        prop_assume!(!(p.is_empty() && c.is_empty()));
        let ev = directional_events(&p, &c).unwrap();
        prop_assert!(ev.len() <= 1);
        let r = edge_mutation_rate::<Ratio<i64>>(&p, &c).unwrap();
        prop_assert!(r == Ratio::from_integer(0) || r == Ratio::from_integer(1));
    }

    #[test]
    fn events_follow_the_two_rules(p in trait_set(TraitKind::Language), c in trait_set(TraitKind::Language)) {
        prop_assume!(!(p.is_empty() && c.is_empty()));
        let got: std::collections::BTreeSet<(String, String)> =
            directional_events(&p, &c).unwrap().into_iter().map(|e| (e.from, e.to)).collect();
        let mut want = std::collections::BTreeSet::new();
        for i in p.values() {
            for j in c.values() {
                let dropped = !c.values().contains(i);
                let added = !p.values().contains(j);
                if dropped || added {
                    want.insert((i.clone(), j.clone()));
                }
            }
        }
        prop_assert_eq!(got, want);
    }

    #[test]
    fn singleton_aggregate_is_exact_fraction(licenses in proptest::collection::vec(0usize..3, 2..30), parents in proptest::collection::vec(0usize..1000, 30)) {
        let names = ["mit", "apache-2.0", "gpl-3.0"];
        let recs: Vec<ModelRecord> = licenses.iter().enumerate().map(|(i, &l)| {
            let tag = format!("license:{}", names[l]);
            let parent = (i > 0).then(|| format!("m{:02}", parents[i] % i));
            model(&format!("m{i:02}"), parent.as_deref(), &[tag.as_str()])
        }).collect();
        let g = build_family_graph(recs);
        let f = finetune_forest(&g);
        let s = aggregate_mutation_rate::<Ratio<i64>>(&g, &f, &TraitKind::License, &TraitOptions::default()).unwrap();
        let mutated = (1..licenses.len()).filter(|&i| licenses[i] != licenses[parents[i] % i]).count() as i64;
        prop_assert_eq!(s.rate, Ratio::new(mutated, licenses.len() as i64 - 1));
    }
}
