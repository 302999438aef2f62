//! Orderings of drift-graph values that agree with as many mutations as
//! possible (a linear ordering problem), solved exactly by a subset dynamic
//! program or approximately by local search.

mod exact;
mod heuristic;
mod score;

pub use exact::{solve_exact, solve_exact_with, DEFAULT_EXACT_CAP};
pub use heuristic::{solve_heuristic, solve_heuristic_with};
pub use score::{score_ordering, score_ordering_with, Agreement, Objective, OrderingResult, SolveOptions, TieRule};
