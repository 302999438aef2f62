use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::metric::PairMetric;
use super::pattern::{Role, SubtreePattern};
use super::sites::{enumerate_sites_with, PairUniverse, PatternSiteTable};
use crate::error::{Error, Result};
use crate::graph::{FinetuneForest, NodeId};
use crate::scalar::FloatScalar;

pub const DEFAULT_SAMPLE_SIZE: usize = 10_000;

/// Unscorable draws tolerated per sample slot before giving up.
pub const MAX_RESAMPLES_PER_DRAW: u32 = 1_000;

/// Generator for draw `index` of a run seeded with `seed`.
pub fn draw_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn check_roles(pattern: SubtreePattern, roles: (Role, Role)) -> Result<(usize, usize)> {
    let find = |r: Role| pattern.position_of(r).ok_or_else(|| Error::InvalidInput(format!("pattern {pattern} has no position {r}")));
    let (i, j) = (find(roles.0)?, find(roles.1)?);
    if i == j {
        return Err(Error::InvalidInput(format!("role pair repeats {}", roles.0)));
    }
    Ok((i, j))
}

/// `k` pairs drawn with replacement. Draw `i` depends only on `(seed, i)`.
pub fn sample_pairs(table: &PatternSiteTable<'_>, roles: (Role, Role), k: usize, seed: u64) -> Result<Vec<(NodeId, NodeId)>> {
    let (i, j) = check_roles(table.pattern(), roles)?;
    if table.total_count() == 0 {
        return Err(Error::NoSites);
    }
    (0..k as u64)
        .into_par_iter()
        .map(|d| {
            let inst = table.draw(&mut draw_rng(seed, d))?;
            Ok((inst.nodes()[i], inst.nodes()[j]))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityEstimate<T> {
    pub pattern: SubtreePattern,
    pub roles: (Role, Role),
    pub metric: String,
    pub sample_size: usize,
    pub mean: T,
    /// Sample standard deviation over `sqrt(sample_size)`.
    pub standard_error: T,
    pub seed: u64,
    /// Draws rejected because a node was external or unscorable.
    pub resampled: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimateOptions {
    pub universe: PairUniverse,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self { universe: PairUniverse::AllNodes }
    }
}

pub fn estimate_similarity<T, M>(
    forest: &FinetuneForest,
    pattern: SubtreePattern,
    roles: (Role, Role),
    metric: &M,
    k: usize,
    seed: u64,
) -> Result<SimilarityEstimate<T>>
where
    T: FloatScalar,
    M: PairMetric<T> + ?Sized,
{
    estimate_similarity_with(forest, pattern, roles, metric, k, seed, EstimateOptions::default())
}

pub fn estimate_similarity_with<T, M>(
    forest: &FinetuneForest,
    pattern: SubtreePattern,
    roles: (Role, Role),
    metric: &M,
    k: usize,
    seed: u64,
    options: EstimateOptions,
) -> Result<SimilarityEstimate<T>>
where
    T: FloatScalar,
    M: PairMetric<T> + ?Sized,
{
    estimate_from_table(&enumerate_sites_with(forest, pattern, options.universe), roles, metric, k, seed)
}

/// Estimate over a prebuilt site table.
pub fn estimate_from_table<T, M>(
    table: &PatternSiteTable<'_>,
    roles: (Role, Role),
    metric: &M,
    k: usize,
    seed: u64,
) -> Result<SimilarityEstimate<T>>
where
    T: FloatScalar,
    M: PairMetric<T> + ?Sized,
{
    if k == 0 {
        return Err(Error::Config("sample size must be at least 1".into()));
    }
    let (pattern, forest) = (table.pattern(), table.forest());
    let (pi, pj) = check_roles(pattern, roles)?;
    if table.total_count() == 0 {
        return Err(Error::NoSites);
    }
    let draws: Vec<(T, u64)> = (0..k as u64)
        .into_par_iter()
        .map(|d| {
            let mut rng = draw_rng(seed, d);
            let mut rejected = 0u64;
            loop {
                let inst = table.draw(&mut rng)?;
                let (a, b) = (inst.nodes()[pi], inst.nodes()[pj]);
                if !forest.is_external(a) && !forest.is_external(b) {
                    if let Some(v) = metric.similarity(a, b) {
                        return Ok((v, rejected));
                    }
                }
                rejected += 1;
                if rejected > u64::from(MAX_RESAMPLES_PER_DRAW) {
                    return Err(Error::NoData(format!("no scorable {pattern} pair after {MAX_RESAMPLES_PER_DRAW} draws")));
                }
            }
        })
        .collect::<Result<_>>()?;

    let n = T::from_count(k as u64);
    let mean = draws.iter().fold(T::zero(), |a, d| a + d.0) / n;
    let standard_error = if k > 1 {
        let ss = draws.iter().fold(T::zero(), |a, d| a + (d.0 - mean) * (d.0 - mean));
        (ss / T::from_count(k as u64 - 1)).sqrt() / n.sqrt()
    } else {
        T::zero()
    };
    Ok(SimilarityEstimate {
        pattern,
        roles,
        metric: metric.id(),
        sample_size: k,
        mean,
        standard_error,
        seed,
        resampled: draws.iter().map(|d| d.1).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::sites::enumerate_sites;

    struct Const;

    impl PairMetric<f64> for Const {
        fn id(&self) -> String {
            "const".into()
        }
        fn similarity(&self, _: NodeId, _: NodeId) -> Option<f64> {
            Some(1.0)
        }
    }

    /// Scores only even-indexed nodes.
    struct EvenOnly;

    impl PairMetric<f64> for EvenOnly {
        fn id(&self) -> String {
            "even".into()
        }
        fn similarity(&self, a: NodeId, b: NodeId) -> Option<f64> {
            (a.0.is_multiple_of(2) && b.0.is_multiple_of(2)).then_some(0.5)
        }
    }

    fn star(leaves: usize) -> FinetuneForest {
        FinetuneForest::from_parents((0..=leaves).map(|i| (i > 0).then_some(NodeId(0))).collect())
    }

    #[test]
    fn constant_metric_has_zero_error() {
        let f = star(10);
        let e = estimate_similarity(&f, SubtreePattern::SiblingFork, (Role::Child1, Role::Child2), &Const, 100, 3).unwrap();
        assert_eq!((e.mean, e.standard_error, e.resampled), (1.0, 0.0, 0));
    }

    #[test]
    fn unscorable_pairs_are_resampled() {
        let f = star(10);
        let e = estimate_similarity(&f, SubtreePattern::Edge, (Role::Parent, Role::Child), &EvenOnly, 200, 9).unwrap();
        assert_eq!(e.mean, 0.5);
        assert!(e.resampled > 0);
    }

    #[test]
    fn single_site_sample() {
        let f = star(1);
        let t = enumerate_sites(&f, SubtreePattern::Edge);
        let pairs = sample_pairs(&t, (Role::Parent, Role::Child), 5, 0).unwrap();
        assert_eq!(pairs, vec![(NodeId(0), NodeId(1)); 5]);
    }

    #[test]
    fn bad_roles_and_empty_tables() {
        let f = star(1);
        let t = enumerate_sites(&f, SubtreePattern::Edge);
        assert!(sample_pairs(&t, (Role::Uncle, Role::Child), 1, 0).is_err());
        let t = enumerate_sites(&f, SubtreePattern::Chain3);
        assert!(matches!(sample_pairs(&t, (Role::Grandparent, Role::Child), 1, 0), Err(Error::NoSites)));
    }

    #[test]
    fn same_seed_same_sample() {
        let f = star(30);
        let t = enumerate_sites(&f, SubtreePattern::TripleFork);
        let a = sample_pairs(&t, (Role::Child1, Role::Child3), 500, 42).unwrap();
        assert_eq!(a, sample_pairs(&t, (Role::Child1, Role::Child3), 500, 42).unwrap());
        assert_ne!(a, sample_pairs(&t, (Role::Child1, Role::Child3), 500, 43).unwrap());
    }
}
