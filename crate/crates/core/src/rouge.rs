//! ROUGE overlap metrics over token lists.
//!
//! N-gram variants use clipped counting: each candidate n-gram can match a
//! reference n-gram at most as many times as it occurs in the reference.
//! The longest-common-subsequence variant rewards in-order (not necessarily
//! contiguous) overlap.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::textcore::{tokenize, Language};

/// Precision / recall / F1 triple, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RougeScore {
    /// Matches over candidate size.
    pub precision: f64,
    /// Matches over reference size.
    pub recall: f64,
    /// Harmonic mean of precision and recall.
    pub f1: f64,
}

impl RougeScore {
    /// The all-zero score used for degenerate inputs.
    pub fn zero() -> RougeScore {
        RougeScore {
            precision: 0.0,
            recall: 0.0,
            f1: 0.0,
        }
    }

    /// Combine precision and recall; F1 is zero when both are zero.
    pub fn from_pr(precision: f64, recall: f64) -> RougeScore {
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        RougeScore {
            precision,
            recall,
            f1,
        }
    }
}

fn ngrams<T: AsRef<str>>(tokens: &[T], n: usize) -> impl Iterator<Item = Vec<&str>> {
    tokens
        .windows(n)
        .map(|w| w.iter().map(AsRef::as_ref).collect())
}

/// ROUGE-N with clipped n-gram counting.
///
/// Precision divides matches by the candidate n-gram count, recall by the
/// reference n-gram count. Returns the all-zero score when either side has
/// fewer than `n` tokens.
///
/// # Panics
///
/// Panics if `n == 0`.
pub fn rouge_n<C: AsRef<str>, R: AsRef<str>>(
    candidate: &[C],
    reference: &[R],
    n: usize,
) -> RougeScore {
    assert!(n >= 1, "n-gram order must be at least 1");
    if candidate.len() < n || reference.len() < n {
        return RougeScore::zero();
    }
    let mut ref_counts: HashMap<Vec<&str>, usize> = HashMap::new();
    for gram in ngrams(reference, n) {
        *ref_counts.entry(gram).or_insert(0) += 1;
    }
    let mut matches = 0usize;
    for gram in ngrams(candidate, n) {
        if let Some(count) = ref_counts.get_mut(&gram) {
            if *count > 0 {
                *count -= 1;
                matches += 1;
            }
        }
    }
    let cand_grams = candidate.len() - n + 1;
    let ref_grams = reference.len() - n + 1;
    let precision = matches as f64 / cand_grams.max(1) as f64;
    let recall = matches as f64 / ref_grams.max(1) as f64;
    RougeScore::from_pr(precision, recall)
}

/// ROUGE-L from the longest common subsequence.
///
/// Precision is `LCS / |candidate|`, recall `LCS / |reference|`. Returns
/// the all-zero score when either list is empty.
pub fn rouge_l<C: AsRef<str>, R: AsRef<str>>(candidate: &[C], reference: &[R]) -> RougeScore {
    if candidate.is_empty() || reference.is_empty() {
        return RougeScore::zero();
    }
    let lcs = lcs_length(candidate, reference);
    let precision = lcs as f64 / candidate.len() as f64;
    let recall = lcs as f64 / reference.len() as f64;
    RougeScore::from_pr(precision, recall)
}

/// Longest common subsequence length via a rolling dynamic-programming row.
fn lcs_length<C: AsRef<str>, R: AsRef<str>>(a: &[C], b: &[R]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x.as_ref() == y.as_ref() {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Tokenize both texts under `lang` and score ROUGE-1.
pub fn rouge1_text(candidate: &str, reference: &str, lang: Language) -> RougeScore {
    let cand = tokenize(candidate, lang);
    let refr = tokenize(reference, lang);
    rouge_n(&cand, &refr, 1)
}
