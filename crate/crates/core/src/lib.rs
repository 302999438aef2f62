//! Family-tree reconstruction and trait-evolution analytics over model
//! registry metadata snapshots.
//!
//! Statistics are generic over [`Scalar`]; the aliases below name the
//! common choices.

pub mod cards;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod mutation;
pub mod ordering;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod similarity;
pub mod synthetic;

pub use error::{Error, Result};
pub use scalar::{FloatScalar, Scalar};

/// Exact rational scalar for count ratios.
pub type Rational = num_rational::Ratio<i64>;
/// Wide rational scalar for large snapshots.
pub type Rational128 = num_rational::Ratio<i128>;
pub type Estimate = sampling::SimilarityEstimate<f64>;
pub type Agreement = ordering::Agreement<f64>;
pub type MutationSummary = mutation::MutationSummary<f64>;
pub type TreeStats = graph::TreeStats<f64>;
pub type CardStats = cards::CardStats<f64>;
