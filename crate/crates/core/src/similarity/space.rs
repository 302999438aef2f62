use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tokenize::{tokenize_with, NgramMode};
use crate::error::{Error, Result};
use crate::scalar::FloatScalar;

pub const DEFAULT_VOCABULARY_CAP: usize = 20_000;

/// How document frequency becomes a weight.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdfMode {
    /// `corpus_size / document_frequency`.
    #[default]
    Literal,
    /// `ln((1 + corpus_size) / (1 + document_frequency)) + 1`.
    LogSmoothed,
}

impl std::str::FromStr for IdfMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(IdfMode::Literal),
            "log-smoothed" | "log" => Ok(IdfMode::LogSmoothed),
            _ => Err(Error::InvalidInput(format!("unknown idf mode {s:?}"))),
        }
    }
}

/// Vocabulary of the most frequent terms in a corpus together with their
/// document frequencies. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TermVectorSpace {
    vocabulary: Vec<String>,
    index: HashMap<String, u32>,
    /// Total occurrences over the corpus, parallel to `vocabulary`.
    frequency: Vec<u64>,
    document_frequency: Vec<u64>,
    corpus_size: u64,
    cap: usize,
    mode: NgramMode,
}

#[derive(Default)]
struct Counts {
    total: HashMap<String, u64>,
    docs: HashMap<String, u64>,
}

impl Counts {
    fn merge(mut self, other: Counts) -> Counts {
        for (t, n) in other.total {
            *self.total.entry(t).or_default() += n;
        }
        for (t, n) in other.docs {
            *self.docs.entry(t).or_default() += n;
        }
        self
    }
}

/// Top-`n` terms by total corpus frequency, ties broken lexicographically.
/// Document frequencies count presence, not multiplicity.
pub fn build_vector_space<S: AsRef<str> + Sync>(corpus: &[S], n: usize) -> Result<TermVectorSpace> {
    build_vector_space_with(corpus, n, NgramMode::Both)
}

pub fn build_vector_space_with<S: AsRef<str> + Sync>(corpus: &[S], n: usize, mode: NgramMode) -> Result<TermVectorSpace> {
    if n == 0 {
        return Err(Error::Config("vocabulary cap must be at least 1".into()));
    }
    let counts = corpus
        .par_iter()
        .fold(Counts::default, |mut acc, doc| {
            let mut local: HashMap<String, u64> = HashMap::new();
            for term in tokenize_with(doc.as_ref(), mode) {
                *local.entry(term).or_default() += 1;
            }
            for (term, c) in local {
                *acc.docs.entry(term.clone()).or_default() += 1;
                *acc.total.entry(term).or_default() += c;
            }
            acc
        })
        .reduce(Counts::default, Counts::merge);

    let mut ranked: Vec<(String, u64)> = counts.total.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(n);

    let document_frequency = ranked.iter().map(|(t, _)| counts.docs[t]).collect();
    let frequency = ranked.iter().map(|(_, c)| *c).collect();
    let vocabulary: Vec<String> = ranked.into_iter().map(|(t, _)| t).collect();
    let index = vocabulary.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
    Ok(TermVectorSpace { vocabulary, index, frequency, document_frequency, corpus_size: corpus.len() as u64, cap: n, mode })
}

impl TermVectorSpace {
    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn frequency(&self, term: &str) -> Option<u64> {
        self.index.get(term).map(|&i| self.frequency[i as usize])
    }

    pub fn document_frequency(&self, term: &str) -> Option<u64> {
        self.index.get(term).map(|&i| self.document_frequency[i as usize])
    }

    pub fn corpus_size(&self) -> u64 {
        self.corpus_size
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn mode(&self) -> NgramMode {
        self.mode
    }

    fn counts(&self, text: &str) -> Vec<(u32, u64)> {
        let mut counts: HashMap<u32, u64> = HashMap::new();
        for term in tokenize_with(text, self.mode) {
            if let Some(&i) = self.index.get(&term) {
                *counts.entry(i).or_default() += 1;
            }
        }
        let mut v: Vec<_> = counts.into_iter().collect();
        v.sort_unstable_by_key(|e| e.0);
        v
    }

    /// Raw term-frequency vector of `text` over the vocabulary.
    pub fn tf_vector<T: FloatScalar>(&self, text: &str) -> TermVector<T> {
        TermVector { entries: self.counts(text).into_iter().map(|(i, c)| (i, T::from_count(c))).collect() }
    }

    pub fn idf<T: FloatScalar>(&self, index: u32, mode: IdfMode) -> T {
        let n = self.corpus_size;
        let df = self.document_frequency[index as usize];
        match mode {
            IdfMode::Literal => T::ratio(n, df),
            IdfMode::LogSmoothed => (T::from_count(1 + n) / T::from_count(1 + df)).ln() + T::one(),
        }
    }

    /// Term frequency times inverse document frequency.
    pub fn tfidf_vector<T: FloatScalar>(&self, text: &str, mode: IdfMode) -> TermVector<T> {
        TermVector { entries: self.counts(text).into_iter().map(|(i, c)| (i, T::from_count(c) * self.idf::<T>(i, mode))).collect() }
    }
}

/// Sparse vector over a vocabulary, entries sorted by index.
#[derive(Debug, Clone, PartialEq)]
pub struct TermVector<T> {
    entries: Vec<(u32, T)>,
}

impl<T: FloatScalar> TermVector<T> {
    pub fn entries(&self) -> &[(u32, T)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.1 == T::zero())
    }

    pub fn norm(&self) -> T {
        self.entries.iter().map(|e| e.1 * e.1).fold(T::zero(), |a, b| a + b).sqrt()
    }

    pub fn dot(&self, other: &Self) -> T {
        let (mut i, mut j) = (0, 0);
        let mut acc = T::zero();
        while i < self.entries.len() && j < other.entries.len() {
            let (a, b) = (&self.entries[i], &other.entries[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc = acc + a.1 * b.1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn cosine(&self, other: &Self) -> Cosine<T> {
        if self.is_zero() || other.is_zero() {
            return Cosine { value: T::zero(), zero_vector: true };
        }
        let value = if self == other { T::one() } else { (self.dot(other) / (self.norm() * other.norm())).max(T::zero()).min(T::one()) };
        Cosine { value, zero_vector: false }
    }
}

/// A cosine similarity in `[0, 1]`. When either vector is zero the value is
/// 0 and `zero_vector` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cosine<T> {
    pub value: T,
    pub zero_vector: bool,
}

/// Cosine of raw term-frequency vectors.
pub fn bow_cosine<T: FloatScalar>(s1: &str, s2: &str, space: &TermVectorSpace) -> Cosine<T> {
    space.tf_vector::<T>(s1).cosine(&space.tf_vector(s2))
}

/// Cosine of TF-IDF vectors with the literal `corpus_size / df` weighting.
pub fn tfidf_cosine<T: FloatScalar>(s1: &str, s2: &str, space: &TermVectorSpace) -> Cosine<T> {
    tfidf_cosine_with(s1, s2, space, IdfMode::Literal)
}

pub fn tfidf_cosine_with<T: FloatScalar>(s1: &str, s2: &str, space: &TermVectorSpace, mode: IdfMode) -> Cosine<T> {
    space.tfidf_vector::<T>(s1, mode).cosine(&space.tfidf_vector(s2, mode))
}
