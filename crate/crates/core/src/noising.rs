//! Input-corruption primitives for denoising pre-training data: span
//! infilling at a sampled mask ratio and uniform sentence permutation.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::textcore::Document;

/// Knobs for the noising stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    /// Lower bound of the sampled mask ratio.
    pub mask_ratio_min: f64,
    /// Upper bound of the sampled mask ratio.
    pub mask_ratio_max: f64,
    /// Mean of the geometric span-length distribution (≥ 1).
    pub mean_span_length: f64,
    /// Token emitted in place of each masked span.
    pub mask_token: String,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            mask_ratio_min: 0.0,
            mask_ratio_max: 0.15,
            mean_span_length: 3.0,
            mask_token: "<mask>".to_string(),
        }
    }
}

impl NoiseConfig {
    /// Check the documented ranges.
    pub fn validate(&self) -> Result<(), Error> {
        if !(0.0..=1.0).contains(&self.mask_ratio_min)
            || !(0.0..=1.0).contains(&self.mask_ratio_max)
            || self.mask_ratio_min > self.mask_ratio_max
        {
            return Err(Error::InvalidConfig(format!(
                "mask ratio bounds must satisfy 0 <= min <= max <= 1 (got {} .. {})",
                self.mask_ratio_min, self.mask_ratio_max
            )));
        }
        if !self.mean_span_length.is_finite() || self.mean_span_length < 1.0 {
            return Err(Error::InvalidConfig(format!(
                "mean span length must be >= 1 (got {})",
                self.mean_span_length
            )));
        }
        if self.mask_token.is_empty() || self.mask_token.contains(char::is_whitespace) {
            return Err(Error::InvalidConfig(
                "mask token must be a non-empty, whitespace-free string".to_string(),
            ));
        }
        Ok(())
    }
}

/// Draw a mask ratio uniformly from `[mask_ratio_min, mask_ratio_max]`.
pub fn sample_mask_ratio<R: Rng + ?Sized>(cfg: &NoiseConfig, rng: &mut R) -> f64 {
    cfg.mask_ratio_min + rng.gen::<f64>() * (cfg.mask_ratio_max - cfg.mask_ratio_min)
}

/// Geometric span length with the given mean, support `{1, 2, ...}`
/// (success probability `1 / mean`, drawn by inverting the CDF).
fn sample_span_length<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 1.0 {
        return 1;
    }
    let p = 1.0 / mean;
    let u: f64 = rng.gen();
    // 1 + floor(ln(1-u) / ln(1-p)); u ∈ [0, 1) keeps both logs finite.
    1 + ((1.0 - u).ln() / (1.0 - p).ln()).floor() as usize
}

/// Replace random disjoint token spans with the mask token until at least
/// `ceil(mask_ratio × tokens)` original tokens are masked.
///
/// Each span starts at a uniformly random unmasked position; its sampled
/// geometric length is capped by both the unmasked run ahead of it and the
/// total mask budget, so overshoot is bounded by the one final span.
/// Contiguous masked blocks emit a single mask token — a full-document mask
/// collapses to exactly one token — and therefore no two adjacent mask
/// tokens ever appear. A ratio of zero returns the input unchanged.
pub fn text_infill<T: AsRef<str>, R: Rng + ?Sized>(
    tokens: &[T],
    mask_ratio: f64,
    cfg: &NoiseConfig,
    rng: &mut R,
) -> Vec<String> {
    let n = tokens.len();
    let budget = ((mask_ratio * n as f64).ceil() as usize).min(n);
    if n == 0 || budget == 0 {
        return tokens.iter().map(|t| t.as_ref().to_string()).collect();
    }

    let mut masked = vec![false; n];
    let mut masked_count = 0usize;
    while masked_count < budget {
        let unmasked: Vec<usize> = (0..n).filter(|&i| !masked[i]).collect();
        let start = unmasked[rng.gen_range(0..unmasked.len())];
        let mut run = 0usize;
        while start + run < n && !masked[start + run] {
            run += 1;
        }
        let span = sample_span_length(cfg.mean_span_length, rng)
            .min(run)
            .min(budget);
        for flag in &mut masked[start..start + span] {
            *flag = true;
        }
        masked_count += span;
    }

    let mut out = Vec::with_capacity(n);
    for (i, token) in tokens.iter().enumerate() {
        if masked[i] {
            if i == 0 || !masked[i - 1] {
                out.push(cfg.mask_token.clone());
            }
        } else {
            out.push(token.as_ref().to_string());
        }
    }
    out
}

/// Return a copy of `doc` with its sentences in a uniformly random order.
pub fn permute_sentences<R: Rng + ?Sized>(doc: &Document, rng: &mut R) -> Document {
    let mut sentences = doc.sentences.clone();
    sentences.shuffle(rng);
    Document {
        id: doc.id.clone(),
        lang: doc.lang,
        sentences,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::record_rng;
    use crate::textcore::Language;
    use std::collections::HashSet;

    fn tokens(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("t{i}")).collect()
    }

    /// Masked-original count recovered purely from input/output shapes.
    fn masked_originals(input_len: usize, output: &[String], mask: &str) -> usize {
        let masks = output.iter().filter(|t| *t == mask).count();
        let survivors = output.len() - masks;
        input_len - survivors
    }

    #[test]
    fn default_config_validates() {
        NoiseConfig::default().validate().unwrap();
    }

    #[test]
    fn bad_configs_are_rejected() {
        let inverted = NoiseConfig {
            mask_ratio_min: 0.5,
            mask_ratio_max: 0.1,
            ..NoiseConfig::default()
        };
        assert!(inverted.validate().is_err());
        let short_span = NoiseConfig {
            mean_span_length: 0.5,
            ..NoiseConfig::default()
        };
        assert!(short_span.validate().is_err());
        let spaced_token = NoiseConfig {
            mask_token: "two words".into(),
            ..NoiseConfig::default()
        };
        assert!(spaced_token.validate().is_err());
    }

    #[test]
    fn mask_ratio_stays_in_bounds_with_expected_mean() {
        let cfg = NoiseConfig::default();
        let mut rng = record_rng(11, "ratio-test");
        let draws: Vec<f64> = (0..100_000).map(|_| sample_mask_ratio(&cfg, &mut rng)).collect();
        assert!(draws.iter().all(|r| (0.0..=0.15).contains(r)));
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        assert!(
            (mean - 0.075).abs() < 0.002,
            "uniform mean should be ~0.075, got {mean}"
        );
    }

    #[test]
    fn zero_ratio_is_identity() {
        let cfg = NoiseConfig::default();
        let mut rng = record_rng(0, "identity");
        let input = tokens(8);
        assert_eq!(text_infill(&input, 0.0, &cfg, &mut rng), input);
        assert!(text_infill::<String, _>(&[], 0.5, &cfg, &mut rng).is_empty());
    }

    #[test]
    fn full_ratio_collapses_to_single_mask() {
        let cfg = NoiseConfig {
            mean_span_length: 10.0,
            ..NoiseConfig::default()
        };
        for seed in 0..50 {
            let mut rng = record_rng(seed, "full-mask");
            let out = text_infill(&tokens(10), 1.0, &cfg, &mut rng);
            assert_eq!(out, vec!["<mask>".to_string()], "seed {seed}");
        }
    }

    #[test]
    fn ten_tokens_at_fifteen_percent_mask_two_or_three() {
        // budget = ceil(1.5) = 2; the final span may overshoot by one since
        // spans are capped at the budget, so the reachable set is {2, 3}.
        let cfg = NoiseConfig::default();
        let mut observed = HashSet::new();
        for seed in 0..300 {
            let mut rng = record_rng(seed, "xldn-band");
            let out = text_infill(&tokens(10), 0.15, &cfg, &mut rng);
            let count = masked_originals(10, &out, &cfg.mask_token);
            assert!((2..=3).contains(&count), "seed {seed}: masked {count}");
            observed.insert(count);
        }
        assert_eq!(
            observed,
            HashSet::from([2, 3]),
            "both reachable counts should occur"
        );
    }

    #[test]
    fn masks_are_never_adjacent_and_spans_never_vanish() {
        let cfg = NoiseConfig::default();
        for seed in 0..200 {
            let mut rng = record_rng(seed, "adjacency");
            let out = text_infill(&tokens(40), 0.3, &cfg, &mut rng);
            for pair in out.windows(2) {
                assert!(
                    !(pair[0] == cfg.mask_token && pair[1] == cfg.mask_token),
                    "adjacent masks at seed {seed}"
                );
            }
            let masks = out.iter().filter(|t| **t == cfg.mask_token).count();
            let masked = masked_originals(40, &out, &cfg.mask_token);
            assert!(masked >= masks, "every mask must replace >= 1 original");
            assert!(masked >= 12, "budget ceil(0.3*40)=12 not reached");
        }
    }

    #[test]
    fn infill_is_deterministic_per_seed() {
        let cfg = NoiseConfig::default();
        let a = text_infill(&tokens(30), 0.15, &cfg, &mut record_rng(7, "det"));
        let b = text_infill(&tokens(30), 0.15, &cfg, &mut record_rng(7, "det"));
        assert_eq!(a, b);
    }

    #[test]
    fn permutation_preserves_sentence_multiset() {
        let doc = Document::from_sentences(
            "p",
            Language::En,
            vec!["One two.".into(), "Three four.".into(), "Five six.".into()],
        );
        let mut rng = record_rng(3, "perm");
        let shuffled = permute_sentences(&doc, &mut rng);
        assert_eq!(shuffled.id, doc.id);
        assert_eq!(shuffled.lang, doc.lang);
        let mut a: Vec<&str> = doc.sentences.iter().map(|s| s.text.as_str()).collect();
        let mut b: Vec<&str> = shuffled.sentences.iter().map(|s| s.text.as_str()).collect();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }

    #[test]
    fn permutation_is_uniform_over_three_sentences() {
        // 6 permutations over 6000 seeds: each frequency within 1/6 ± 0.02.
        let doc = Document::from_sentences(
            "p",
            Language::En,
            vec!["aa bb.".into(), "cc dd.".into(), "ee ff.".into()],
        );
        let mut counts: std::collections::HashMap<String, u32> = Default::default();
        for seed in 0..6000 {
            let mut rng = record_rng(seed, "perm-uniform");
            let got = permute_sentences(&doc, &mut rng);
            let key: Vec<&str> = got.sentences.iter().map(|s| s.text.as_str()).collect();
            *counts.entry(key.join("|")).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 6, "all 6 permutations should occur");
        for (perm, count) in &counts {
            let freq = *count as f64 / 6000.0;
            assert!(
                (freq - 1.0 / 6.0).abs() <= 0.02,
                "{perm}: frequency {freq} outside 1/6 ± 0.02"
            );
        }
    }
}
