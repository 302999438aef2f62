//! Character-level edit distance.
//!
//! Uses the blocked bit-vector formulation of the Levenshtein recurrence
//! (Myers 1999, Hyyrö 2003): each column of the DP matrix is held as vertical
//! delta bit-vectors in 64-row words, so a text character costs
//! `O(ceil(m / 64))` word operations instead of `O(m)` cell updates.

use std::collections::HashMap;

use crate::scalar::Scalar;

/// Character cap applied before edit distance on very long texts.
pub const DEFAULT_MAX_CHARS: usize = 1_000_000;

struct PatternMasks {
    blocks: usize,
    ascii: Vec<u64>,
    other: HashMap<char, Vec<u64>>,
}

impl PatternMasks {
    fn new(pattern: &[char]) -> Self {
        let blocks = pattern.len().div_ceil(64);
        let mut ascii = vec![0u64; 128 * blocks];
        let mut other: HashMap<char, Vec<u64>> = HashMap::new();
        for (i, &c) in pattern.iter().enumerate() {
            let (b, bit) = (i / 64, 1u64 << (i % 64));
            if c.is_ascii() {
                ascii[c as usize * blocks + b] |= bit;
            } else {
                other.entry(c).or_insert_with(|| vec![0; blocks])[b] |= bit;
            }
        }
        Self { blocks, ascii, other }
    }

    #[inline]
    fn get(&self, c: char, block: usize) -> u64 {
        if c.is_ascii() {
            self.ascii[c as usize * self.blocks + block]
        } else {
            self.other.get(&c).map_or(0, |v| v[block])
        }
    }
}

/// Advance one 64-row block by one text column. `hin` is the horizontal
/// delta entering the block's top row; returns the delta leaving the row
/// marked by `high`.
#[inline]
fn advance_block(pv: &mut u64, mv: &mut u64, eq: u64, hin: i32, high: u64) -> i32 {
    let hin_neg = u64::from(hin < 0);
    let xv = eq | *mv;
    let eq = eq | hin_neg;
    let xh = ((eq & *pv).wrapping_add(*pv) ^ *pv) | eq;
    let mut ph = *mv | !(xh | *pv);
    let mut mh = *pv & xh;
    let hout = if ph & high != 0 {
        1
    } else if mh & high != 0 {
        -1
    } else {
        0
    };
    ph = (ph << 1) | u64::from(hin > 0);
    mh = (mh << 1) | hin_neg;
    *pv = mh | !(xv | ph);
    *mv = ph & xv;
    hout
}

fn distance_chars(a: &[char], b: &[char]) -> usize {
    let (pattern, text) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let m = pattern.len();
    if m == 0 {
        return text.len();
    }
    let masks = PatternMasks::new(pattern);
    let blocks = masks.blocks;
    let last_high = 1u64 << ((m - 1) % 64);
    let mut pv = vec![!0u64; blocks];
    let mut mv = vec![0u64; blocks];
    let mut score = m as i64;
    for &c in text {
        let mut h = 1;
        for blk in 0..blocks {
            let high = if blk + 1 == blocks { last_high } else { 1 << 63 };
            h = advance_block(&mut pv[blk], &mut mv[blk], masks.get(c, blk), h, high);
        }
        score += i64::from(h);
    }
    score as usize
}

/// Minimum number of single-character insertions, deletions and
/// substitutions turning `a` into `b`, counted over Unicode scalar values.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    distance_chars(&a, &b)
}

/// `1 - edit_distance / max(len)`; two empty strings are identical.
pub fn normalized_levenshtein_similarity<T: Scalar>(a: &str, b: &str) -> T {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    similarity_chars(&a, &b)
}

fn similarity_chars<T: Scalar>(a: &[char], b: &[char]) -> T {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return T::one();
    }
    let d = distance_chars(a, b);
    T::ratio((longest - d) as u64, longest as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CappedSimilarity<T> {
    pub value: T,
    /// At least one input exceeded the cap and was truncated.
    pub truncated: bool,
}

/// [`normalized_levenshtein_similarity`] over inputs truncated to their first
/// `max_chars` characters.
pub fn levenshtein_similarity_capped<T: Scalar>(a: &str, b: &str, max_chars: usize) -> CappedSimilarity<T> {
    let a: Vec<char> = a.chars().take(max_chars.saturating_add(1)).collect();
    let b: Vec<char> = b.chars().take(max_chars.saturating_add(1)).collect();
    let truncated = a.len() > max_chars || b.len() > max_chars;
    let a = &a[..a.len().min(max_chars)];
    let b = &b[..b.len().min(max_chars)];
    CappedSimilarity { value: similarity_chars(a, b), truncated }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn kitten_sitting() {
        assert_eq!(edit_distance("kitten", "sitting"), 3);
        assert_eq!(normalized_levenshtein_similarity::<Ratio<i64>>("kitten", "sitting"), Ratio::new(4, 7));
    }

    #[test]
    fn identity_and_empty_cases() {
        assert_eq!(normalized_levenshtein_similarity::<f64>("same", "same"), 1.0);
        assert_eq!(normalized_levenshtein_similarity::<f64>("", ""), 1.0);
        assert_eq!(normalized_levenshtein_similarity::<f64>("", "abc"), 0.0);
    }

    #[test]
    fn crosses_block_boundaries() {
        let a = "a".repeat(130);
        let mut b = a.clone();
        b.replace_range(64..65, "b");
        b.push_str("cc");
        assert_eq!(edit_distance(&a, &b), 3);
        assert_eq!(edit_distance(&a, ""), 130);
    }

    #[test]
    fn unicode_counts_scalars() {
        assert_eq!(edit_distance("naïve", "naive"), 1);
        assert_eq!(edit_distance("日本語", "日本"), 1);
    }

    #[test]
    fn cap_truncates_and_flags() {
        let r = levenshtein_similarity_capped::<f64>("abcdef", "abcxyz", 3);
        assert_eq!(r, CappedSimilarity { value: 1.0, truncated: true });
        let r = levenshtein_similarity_capped::<f64>("abc", "abd", 3);
        assert!(!r.truncated);
    }
}
