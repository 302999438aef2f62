#![allow(dead_code)]

use lineage::graph::{FinetuneForest, NodeId};
use lineage::sampling::SubtreePattern;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random forest where node `i` attaches to a uniform earlier node, or
/// starts a new tree with probability `root_p`.
pub fn random_forest(n: usize, root_p: f64, seed: u64) -> FinetuneForest {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parents = (0..n).map(|i| if i == 0 || rng.random_bool(root_p) { None } else { Some(NodeId(rng.random_range(0..i))) }).collect();
    FinetuneForest::from_parents(parents)
}

fn parent_array(f: &FinetuneForest) -> Vec<Option<usize>> {
    f.nodes().map(|n| f.parent(n).map(|p| p.0)).collect()
}

/// Every ordered realization of `pattern`, built from the parent array
/// alone. Symmetric positions appear in every order, so a uniform choice
/// over this list is a uniform occurrence with uniformly ordered twins.
pub fn ordered_instances(f: &FinetuneForest, pattern: SubtreePattern) -> Vec<Vec<usize>> {
    let parent = parent_array(f);
    let n = parent.len();
    let kids = |u: usize| -> Vec<usize> { (0..n).filter(|&c| parent[c] == Some(u)).collect() };
    let mut out = Vec::new();
    for u in 0..n {
        match pattern {
            SubtreePattern::RandomPair => {
                for v in 0..n {
                    if v != u {
                        out.push(vec![u, v]);
                    }
                }
            }
            SubtreePattern::Edge => {
                for v in kids(u) {
                    out.push(vec![u, v]);
                }
            }
            SubtreePattern::SiblingFork => {
                for a in kids(u) {
                    for b in kids(u) {
                        if a != b {
                            out.push(vec![u, a, b]);
                        }
                    }
                }
            }
            SubtreePattern::TripleFork => {
                let k = kids(u);
                for &a in &k {
                    for &b in &k {
                        for &c in &k {
                            if a != b && b != c && a != c {
                                out.push(vec![u, a, b, c]);
                            }
                        }
                    }
                }
            }
            SubtreePattern::Chain3 => {
                for v in kids(u) {
                    for w in kids(v) {
                        out.push(vec![u, v, w]);
                    }
                }
            }
            SubtreePattern::ForkUnderEdge => {
                for v in kids(u) {
                    for a in kids(v) {
                        for b in kids(v) {
                            if a != b {
                                out.push(vec![u, v, a, b]);
                            }
                        }
                    }
                }
            }
            SubtreePattern::UncleFork => {
                for v in kids(u) {
                    for uncle in kids(u) {
                        if uncle == v {
                            continue;
                        }
                        for w in kids(v) {
                            out.push(vec![u, uncle, v, w]);
                        }
                    }
                }
            }
            SubtreePattern::Chain4 => {
                for v in kids(u) {
                    for w in kids(v) {
                        for x in kids(w) {
                            out.push(vec![u, v, w, x]);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Number of ways to order the interchangeable positions of a pattern.
pub fn symmetry(pattern: SubtreePattern) -> u128 {
    match pattern {
        SubtreePattern::RandomPair | SubtreePattern::SiblingFork | SubtreePattern::ForkUnderEdge => 2,
        SubtreePattern::TripleFork => 6,
        _ => 1,
    }
}

/// Occurrence counts per pattern found by enumerating every connected node
/// subset of size 2 to 4 and classifying its shape. Small forests only.
pub fn subset_census(f: &FinetuneForest) -> [u128; 8] {
    let parent = parent_array(f);
    let n = parent.len();
    let mut counts = [0u128; 8];
    counts[0] = (n as u128) * (n as u128).saturating_sub(1) / 2;
    let mut set = Vec::new();
    fn rec(start: usize, n: usize, set: &mut Vec<usize>, parent: &[Option<usize>], counts: &mut [u128; 8]) {
        if set.len() >= 2 {
            if let Some(p) = classify(set, parent) {
                counts[p] += 1;
            }
        }
        if set.len() == 4 {
            return;
        }
        for v in start..n {
            set.push(v);
            rec(v + 1, n, set, parent, counts);
            set.pop();
        }
    }
    rec(0, n, &mut set, &parent, &mut counts);
    counts
}

/// Shape of a node set as an index into `SubtreePattern::ALL`, if the set
/// induces a connected subtree.
fn classify(set: &[usize], parent: &[Option<usize>]) -> Option<usize> {
    let inside = |x: usize| set.contains(&x);
    let edges: Vec<(usize, usize)> = set.iter().filter_map(|&c| parent[c].filter(|&p| inside(p)).map(|p| (p, c))).collect();
    if edges.len() != set.len() - 1 {
        return None;
    }
    let out_deg = |x: usize| edges.iter().filter(|e| e.0 == x).count();
    let has_parent = |x: usize| edges.iter().any(|e| e.1 == x);
    let max_out = set.iter().map(|&x| out_deg(x)).max().unwrap();
    Some(match (set.len(), max_out) {
        (2, _) => 1,
        (3, 2) => 2,
        (3, 1) => 3,
        (4, 3) => 4,
        (4, 1) => 7,
        (4, 2) => {
            let fork = *set.iter().find(|&&x| out_deg(x) == 2).unwrap();
            if has_parent(fork) {
                5
            } else {
                6
            }
        }
        _ => unreachable!(),
    })
}

pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, v.sqrt())
}

/// Random traffic matrix over `n` values; roughly `density` of the ordered
/// pairs carry between 1 and `max` events.
pub fn random_traffic(n: usize, density: f64, max: u64, seed: u64) -> (Vec<String>, Vec<Vec<u64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names: Vec<String> = (0..n).map(|i| format!("t{i:02}")).collect();
    names.shuffle(&mut rng);
    let t =
        (0..n).map(|i| (0..n).map(|j| if i != j && rng.random_bool(density) { rng.random_range(1..=max) } else { 0 }).collect()).collect();
    (names, t)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}
