use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::score::{weights, Objective, OrderingResult, SolveOptions};
use crate::mutation::DriftGraph;

pub fn solve_heuristic(graph: &DriftGraph, objective: Objective, seed: u64) -> OrderingResult {
    solve_heuristic_with(graph, &SolveOptions { objective, ..Default::default() }, seed)
}

/// Construction order: repeatedly take a value with no remaining incoming
/// weight, else the one with the largest outgoing minus incoming weight.
/// Candidates are visited in a seeded random order so ties are seed dependent.
fn construction_order(w: &[Vec<u64>], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = w.len();
    let mut candidates: Vec<usize> = (0..n).collect();
    candidates.shuffle(rng);
    let mut placed = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let score = |v: usize| {
            let (mut inw, mut outw) = (0i128, 0i128);
            for u in 0..n {
                if !placed[u] && u != v {
                    inw += i128::from(w[u][v]);
                    outw += i128::from(w[v][u]);
                }
            }
            (inw == 0, outw - inw)
        };
        let pick = candidates.iter().copied().filter(|&v| !placed[v]).max_by_key(|&v| score(v)).expect("a value remains");
        placed[pick] = true;
        out.push(pick);
    }
    out
}

/// Best position to insert `v` into `order`, earliest on ties.
fn best_insertion(w: &[Vec<u64>], order: &[usize], v: usize) -> (usize, i128) {
    // value at position 0 relative to placing v last
    let mut cur: i128 = order.iter().map(|&u| i128::from(w[v][u])).sum();
    let mut best = (0, cur);
    for (at, &u) in order.iter().enumerate() {
        cur += i128::from(w[u][v]) - i128::from(w[v][u]);
        if cur > best.1 {
            best = (at + 1, cur);
        }
    }
    best
}

/// Insertion construction followed by adjacent-swap and single-value
/// relocation until neither move improves the objective.
pub fn solve_heuristic_with(graph: &DriftGraph, options: &SolveOptions, seed: u64) -> OrderingResult {
    let start = Instant::now();
    let w = weights(graph, options.objective, options.tie_rule);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = Vec::with_capacity(w.len());
    for v in construction_order(&w, &mut rng) {
        let (at, _) = best_insertion(&w, &order, v);
        order.insert(at, v);
    }

    loop {
        let mut improved = false;
        for i in 0..order.len().saturating_sub(1) {
            let (a, b) = (order[i], order[i + 1]);
            if w[b][a] > w[a][b] {
                order.swap(i, i + 1);
                improved = true;
            }
        }
        for i in 0..order.len() {
            let v = order.remove(i);
            let here: i128 = {
                let (before, after) = order.split_at(i);
                before.iter().map(|&u| i128::from(w[u][v])).sum::<i128>() + after.iter().map(|&u| i128::from(w[v][u])).sum::<i128>()
            };
            let (at, value) = best_insertion(&w, &order, v);
            if value > here {
                order.insert(at, v);
                improved = true;
            } else {
                order.insert(i, v);
            }
        }
        if !improved {
            break;
        }
    }
    OrderingResult::from_order(graph, &order, options, false, "insertion-local-search", start.elapsed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mutation::TraitKind;

    #[test]
    fn acyclic_reaches_full_agreement() {
        // a -> b -> c -> d plus a -> d, names scrambled
        let names = ["q", "c", "x", "a"].iter().map(|s| s.to_string()).collect();
        let g =
            DriftGraph::from_traffic(TraitKind::Task, names, vec![vec![0, 3, 0, 1], vec![0, 0, 2, 0], vec![0, 0, 0, 5], vec![0, 0, 0, 0]]);
        for seed in 0..20 {
            for obj in [Objective::DriftAgreement, Objective::MutationAgreement] {
                let r = solve_heuristic(&g, obj, seed);
                assert_eq!(r.agreement.drift_agreement, 1.0, "seed {seed}");
                assert_eq!(r.permutation, ["q", "c", "x", "a"]);
                assert!(!r.optimal);
            }
        }
    }

    #[test]
    fn seeded_determinism() {
        let n = 9;
        let t: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| ((i * 7 + j * 3) % 5) as u64 * u64::from(i != j)).collect()).collect();
        let g = DriftGraph::from_traffic(TraitKind::License, (0..n).map(|i| format!("v{i}")).collect(), t);
        let a = solve_heuristic(&g, Objective::MutationAgreement, 3);
        assert_eq!(a.permutation, solve_heuristic(&g, Objective::MutationAgreement, 3).permutation);
    }
}
