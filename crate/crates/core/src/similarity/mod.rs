//! Genetic-similarity measures between metadata strings or model cards:
//! normalized Levenshtein similarity and cosine similarity of term-frequency
//! and TF-IDF vectors.

mod levenshtein;
mod space;
mod tokenize;

pub use levenshtein::{
    edit_distance, levenshtein_similarity_capped, normalized_levenshtein_similarity, CappedSimilarity, DEFAULT_MAX_CHARS,
};
pub use space::{
    bow_cosine, build_vector_space, build_vector_space_with, tfidf_cosine, tfidf_cosine_with, Cosine, IdfMode, TermVector, TermVectorSpace,
    DEFAULT_VOCABULARY_CAP,
};
pub use tokenize::{tokenize, tokenize_with, NgramMode};
