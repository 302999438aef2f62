mod common;

use std::collections::VecDeque;

use chrono::{Duration, TimeZone, Utc};
use lineage::graph::*;
use lineage::ingest::{ModelRecord, RelationKind};
use lineage::Rational;
use proptest::prelude::*;

fn at(day: i64) -> chrono::DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap() + Duration::days(day)
}

fn child(id: &str, kind: &str, parent: &str, day: i64) -> ModelRecord {
    ModelRecord::builder(id, at(day)).tag(format!("base_model:{kind}:{parent}")).build()
}

/// One base model with five finetunes and thirteen quantizations; the
/// finetunes carry 128 further descendants. 147 models in total.
fn granite_like() -> Vec<ModelRecord> {
    let mut recs = vec![ModelRecord::builder("ibm/base", at(0)).build()];
    for i in 0..5 {
        recs.push(child(&format!("ft/{i}"), "finetune", "ibm/base", 1 + i));
    }
    for i in 0..13 {
        recs.push(child(&format!("q/{i}"), "quantized", "ibm/base", 2 + i));
    }
    for i in 0..128 {
        let parent = if i < 40 { format!("ft/{}", i % 5) } else { format!("d/{}", i - 40) };
        let kind = if i % 9 == 0 { "quantized" } else { "finetune" };
        recs.push(child(&format!("d/{i}"), kind, &parent, 10 + i as i64));
    }
    recs
}

#[test]
fn granite_shape() {
    let g = build_family_graph(granite_like());
    assert_eq!(g.len(), 147);
    let root = g.lookup("ibm/base").unwrap();
    assert_eq!(g.child_edges(root).count(), 18);
    assert_eq!(g.successors(root, RelationKind::Finetune).count(), 5);
    assert_eq!(g.successors(root, RelationKind::Quantized).count(), 13);
    assert_eq!(g.components().len(), 1);

    let f = finetune_forest(&g);
    assert_eq!(f.n_succ(root), 5);
    let mut in_tree = [false; 128];
    for i in 0..128 {
        in_tree[i] = i % 9 != 0 && (i < 40 || in_tree[i - 40]);
    }
    assert_eq!(f.tree(root).len(), 1 + 5 + in_tree.iter().filter(|&&b| b).count());
    let growth = component_growth(&g, 0).unwrap();
    assert_eq!(growth.points.last().unwrap().cumulative, 147);
    assert!(!growth.any_backfilled);
}

/// Mean pairwise distance by breadth-first search from every node.
fn bfs_virality(f: &FinetuneForest, root: NodeId) -> Rational {
    let members = f.tree(root);
    let index = |v: NodeId| members.iter().position(|&m| m == v).unwrap();
    let mut total = 0i64;
    for &s in &members {
        let mut dist = vec![usize::MAX; members.len()];
        dist[index(s)] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            let d = dist[index(v)];
            let next = f.children(v).iter().copied().chain(f.parent(v));
            for w in next {
                if dist[index(w)] == usize::MAX {
                    dist[index(w)] = d + 1;
                    q.push_back(w);
                }
            }
        }
        total += dist.iter().sum::<usize>() as i64;
    }
    let n = members.len() as i64;
    Rational::new(total / 2, n * (n - 1) / 2)
}

#[test]
fn virality_matches_breadth_first_search() {
    for seed in 0..30 {
        let f = common::random_forest(40, 0.1, seed);
        for &r in f.roots() {
            if f.tree(r).len() >= 2 {
                assert_eq!(structural_virality::<Rational>(&f, r).unwrap(), bfs_virality(&f, r));
            }
        }
    }
}

#[test]
fn path_and_star_closed_forms() {
    for n in 2..=200usize {
        let path = FinetuneForest::from_parents((0..n).map(|i| i.checked_sub(1).map(NodeId)).collect());
        assert_eq!(structural_virality::<Rational>(&path, NodeId(0)).unwrap(), Rational::new(n as i64 + 1, 3));
        let star = FinetuneForest::from_parents((0..=n).map(|i| (i > 0).then_some(NodeId(0))).collect());
        assert_eq!(structural_virality::<Rational>(&star, NodeId(0)).unwrap(), Rational::new(2 * n as i64, n as i64 + 1));
    }
}

fn declared(n: usize) -> impl Strategy<Value = Vec<(Vec<(usize, usize)>, i64)>> {
    // Per model: (parent index, kind index) declarations and a creation day.
    proptest::collection::vec((proptest::collection::vec((0..n, 0usize..4), 0..3), 0i64..30), n)
}

fn build(decl: &[(Vec<(usize, usize)>, i64)]) -> FamilyGraph {
    let recs = decl
        .iter()
        .enumerate()
        .map(|(i, (parents, day))| {
            let tags = parents.iter().map(|&(p, k)| format!("base_model:{}:m{p:02}", RelationKind::ALL[k].as_str()));
            ModelRecord::builder(format!("m{i:02}"), at(*day)).tags(tags).build()
        })
        .collect();
    build_family_graph(recs)
}

proptest! {
    #[test]
    fn repaired_graph_is_acyclic_without_self_loops(decl in declared(25)) {
        let g = build(&decl);
        for e in g.edges() {
            prop_assert_ne!(e.parent, e.child);
        }
        // Kahn's algorithm consumes every node iff there is no cycle.
        let mut indeg = vec![0usize; g.len()];
        for e in g.edges() {
            indeg[e.child.index()] += 1;
        }
        let mut q: Vec<NodeId> = g.nodes().filter(|v| indeg[v.index()] == 0).collect();
        let mut seen = 0;
        while let Some(v) = q.pop() {
            seen += 1;
            for e in g.child_edges(v) {
                indeg[e.child.index()] -= 1;
                if indeg[e.child.index()] == 0 {
                    q.push(e.child);
                }
            }
        }
        prop_assert_eq!(seen, g.len());
        let mut pairs: Vec<_> = g.edges().iter().map(|e| (e.parent, e.child, e.kind)).collect();
        let n = pairs.len();
        pairs.sort();
        pairs.dedup();
        prop_assert_eq!(pairs.len(), n);
    }

    #[test]
    fn forest_is_the_first_finetune_parent(decl in declared(25)) {
        let g = build(&decl);
        let f = finetune_forest(&g);
        let gens = f.generations();
        for v in f.nodes() {
            match f.parent(v) {
                Some(p) => {
                    prop_assert!(g.parent_edges(v).any(|e| e.parent == p && e.kind == RelationKind::Finetune));
                    prop_assert_eq!(gens[v.index()], gens[p.index()] + 1);
                    prop_assert!(f.children(p).contains(&v));
                }
                None => {
                    prop_assert!(f.roots().contains(&v));
                    prop_assert_eq!(gens[v.index()], 0);
                }
            }
        }
        let sizes: usize = f.roots().iter().map(|&r| f.tree(r).len()).sum();
        prop_assert_eq!(sizes, f.len());
    }

    #[test]
    fn growth_is_monotone(decl in declared(25)) {
        let g = build(&decl);
        for (i, members) in g.components().iter().enumerate() {
            let s = component_growth(&g, i).unwrap();
            for w in s.points.windows(2) {
                prop_assert!(w[0].at < w[1].at && w[0].cumulative < w[1].cumulative);
            }
            let recorded = members.iter().filter(|&&m| g.record(m).is_some()).count();
            prop_assert_eq!(s.points.last().map_or(0, |p| p.cumulative), recorded);
            prop_assert_eq!(s.skipped_external, members.len() - recorded);
        }
    }

    #[test]
    fn depth_stats_by_hand(seed in 0u64..1000) {
        let f = common::random_forest(30, 0.2, seed);
        let gens = f.generations();
        for t in depth_stats::<Rational>(&f) {
            let members = f.tree(t.root);
            let sum: usize = members.iter().map(|m| gens[m.index()]).sum();
            prop_assert_eq!(t.size, members.len());
            prop_assert_eq!(t.mean_depth, Rational::new(sum as i64, members.len() as i64));
            prop_assert_eq!(t.max_depth, members.iter().map(|m| gens[m.index()]).max().unwrap());
            prop_assert_eq!(t.virality.is_none(), members.len() == 1);
        }
    }
}
