use std::time::Instant;

use super::score::{weights, OrderingResult, SolveOptions};
use crate::error::{Error, Result};
use crate::mutation::DriftGraph;

pub const DEFAULT_EXACT_CAP: usize = 22;

/// Precomputed `gain(S, v) = sum_{u in S} w[u][v]`, one 256-entry table per
/// byte of the subset mask.
struct Gains {
    n: usize,
    chunks: usize,
    table: Vec<u64>,
}

impl Gains {
    #[allow(clippy::needless_range_loop)]
    fn new(w: &[Vec<u64>]) -> Self {
        let n = w.len();
        let chunks = n.div_ceil(8).max(1);
        let mut table = vec![0u64; n * chunks * 256];
        for v in 0..n {
            for c in 0..chunks {
                let base = (v * chunks + c) * 256;
                for byte in 1..256usize {
                    let low = byte.trailing_zeros() as usize;
                    let u = c * 8 + low;
                    let add = if u < n { w[u][v] } else { 0 };
                    table[base + byte] = table[base + (byte & (byte - 1))] + add;
                }
            }
        }
        Self { n, chunks, table }
    }

    #[inline]
    fn gain(&self, set: usize, v: usize) -> u64 {
        let base = v * self.chunks * 256;
        (0..self.chunks).map(|c| self.table[base + c * 256 + ((set >> (8 * c)) & 0xff)]).sum()
    }
}

pub fn solve_exact(graph: &DriftGraph, objective: super::Objective) -> Result<OrderingResult> {
    solve_exact_with(graph, &SolveOptions { objective, ..Default::default() })
}

/// Optimal ordering by dynamic programming over the set of already placed
/// values. Among optimal orderings the lexicographically smallest one (by
/// sorted value index) is returned.
pub fn solve_exact_with(graph: &DriftGraph, options: &SolveOptions) -> Result<OrderingResult> {
    let n = graph.len();
    if n > options.exact_cap || n >= usize::BITS as usize {
        return Err(Error::TooLarge { nodes: n, cap: options.exact_cap });
    }
    let start = Instant::now();
    let w = weights(graph, options.objective, options.tie_rule);
    let gains = Gains::new(&w);
    let full = (1usize << n) - 1;

    // best[S]: most that placing the values outside S after S can still earn
    let mut best = vec![0u64; full + 1];
    for set in (0..full).rev() {
        let mut top = 0;
        let mut rest = full & !set;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            top = top.max(gains.gain(set, v) + best[set | (1 << v)]);
        }
        best[set] = top;
    }

    let mut order = Vec::with_capacity(n);
    let mut set = 0usize;
    while set != full {
        let v = (0..gains.n)
            .find(|&v| set & (1 << v) == 0 && gains.gain(set, v) + best[set | (1 << v)] == best[set])
            .expect("some value attains the optimum");
        order.push(v);
        set |= 1 << v;
    }
    Ok(OrderingResult::from_order(graph, &order, options, true, "exact-subset-dp", start.elapsed()))
}
