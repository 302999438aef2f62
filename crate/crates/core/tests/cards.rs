use std::collections::HashMap;

use chrono::{TimeZone, Utc};
use lineage::cards::*;
use lineage::graph::{build_family_graph, finetune_forest};
use lineage::ingest::{attach_cards, CardStore, ModelRecord};
use lineage::Rational;
use proptest::prelude::*;

fn rec(id: &str, parent: Option<(&str, &str)>, card: Option<String>) -> ModelRecord {
    let mut b = ModelRecord::builder(id, Utc.with_ymd_and_hms(2024, 5, 1, 0, 0, 0).unwrap());
    if let Some((kind, p)) = parent {
        b = b.tag(format!("base_model:{kind}:{p}"));
    }
    if let Some(c) = card {
        b = b.card(c);
    }
    b.build()
}

#[test]
fn ten_edge_length_delta() {
    // (parent length, child length) per finetune edge:
    //  1200-300, 1200-1200, 1200-50, 300-900, 300-0,
    //  900-450, 900-1000, 50-20, 50-50, 1000-10
    // drops: 900 + 0 + 1150 - 600 + 300 + 450 - 100 + 30 + 0 + 990 = 3120
    let edges = [
        ("r", "a", 1200, 300),
        ("r", "b", 1200, 1200),
        ("r", "c", 1200, 50),
        ("a", "d", 300, 900),
        ("a", "e", 300, 0),
        ("d", "f", 900, 450),
        ("d", "g", 900, 1000),
        ("c", "h", 50, 20),
        ("c", "i", 50, 50),
        ("g", "j", 1000, 10),
    ];
    let mut recs = vec![rec("r", None, Some("x".repeat(1200)))];
    for (p, c, _, len) in edges {
        recs.push(rec(c, Some(("finetune", p)), Some("y".repeat(len))));
    }
    // Edges without both cards do not count.
    recs.push(rec("k", Some(("finetune", "j")), None));
    recs.push(rec("l", Some(("quantized", "r")), Some("z".repeat(5))));
    let g = build_family_graph(recs);
    let f = finetune_forest(&g);
    let d = parent_child_delta::<Rational>(&g, &f).unwrap();
    assert_eq!(d.edges, 10);
    assert_eq!(d.mean, Rational::new(3120, 10));
}

#[test]
fn equal_lengths_give_zero_delta() {
    let recs = vec![
        rec("r", None, Some("abc".into())),
        rec("a", Some(("finetune", "r")), Some("def".into())),
        rec("b", Some(("finetune", "a")), Some("ghi".into())),
    ];
    let g = build_family_graph(recs);
    let d = parent_child_delta::<f64>(&g, &finetune_forest(&g)).unwrap();
    assert_eq!((d.mean, d.edges), (0.0, 2));
}

#[test]
fn only_adapter_children_flagged() {
    let marker =
        Some("This model card has been generated automatically according to the information the Trainer had access to.".to_owned());
    let plain = Some("A hand-written description.".to_owned());
    let recs = vec![
        rec("base", None, plain.clone()),
        rec("ad1", Some(("adapter", "base")), marker.clone()),
        rec("ad2", Some(("adapter", "base")), marker),
        rec("ft", Some(("finetune", "base")), plain.clone()),
        rec("qz", Some(("quantized", "base")), plain.clone()),
        rec("mg", Some(("merge", "base")), plain),
    ];
    let g = build_family_graph(recs);
    for r in autogen_rate::<Rational>(&g) {
        let want = if r.group == "adapter" { 1 } else { 0 };
        assert_eq!(r.fraction, Some(Rational::from_integer(want)), "group {}", r.group);
    }
}

#[test]
fn cards_from_a_store_fill_missing_text() {
    let dir = tempfile::tempdir().unwrap();
    let store = CardStore::open(dir.path());
    store.write([("org/a", "card a"), ("org/c", "card c")]).unwrap();
    let mut recs = vec![rec("org/a", None, None), rec("org/b", None, None), rec("org/c", None, Some("inline".into()))];
    assert_eq!(attach_cards(&mut recs, &store.load_all().unwrap()), 1);
    assert_eq!(recs[0].card_text.as_deref(), Some("card a"));
    assert_eq!(recs[2].card_text.as_deref(), Some("inline"));
    assert_eq!(card_coverage::<Rational>(&recs), Rational::new(2, 3));
    assert_eq!(card_coverage::<f64>(&recs[1..2]), 0.0);
    assert!(attach_cards(&mut recs, &HashMap::new()) == 0);
}

proptest! {
    #[test]
    fn length_stats_match_sorting(lengths in proptest::collection::vec(0usize..300, 1..40)) {
        let recs: Vec<ModelRecord> = lengths
            .iter()
            .enumerate()
            .map(|(i, &n)| rec(&format!("m{i}"), None, Some("w ".repeat(n / 2) + &"é".repeat(n % 2))))
            .collect();
        let s = length_stats::<Rational>(&recs).unwrap();
        let mut sorted: Vec<i64> = recs.iter().map(|r| r.card_text.as_ref().unwrap().chars().count() as i64).collect();
        sorted.sort();
        let n = sorted.len();
        let median = if n % 2 == 1 {
            Rational::from_integer(sorted[n / 2])
        } else {
            Rational::new(sorted[n / 2 - 1] + sorted[n / 2], 2)
        };
        prop_assert_eq!(s.median, median);
        prop_assert_eq!(s.mean, Rational::new(sorted.iter().sum(), n as i64));
        prop_assert_eq!((s.min as i64, s.max as i64), (sorted[0], sorted[n - 1]));
    }

    #[test]
    fn marker_survives_whitespace_and_case(pre in "[a-z ]{0,10}", gap in "[ \t\n]{1,4}", upper in any::<bool>()) {
        let word = if upper { "AUTOMATICALLY" } else { "automatically" };
        let text = format!("{pre}{word}{gap}generated");
        prop_assert!(is_autogenerated(&text));
        let broken = format!("{pre}{word},{gap}generated");
        prop_assert!(!is_autogenerated(&broken));
    }
}
