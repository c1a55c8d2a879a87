//! Construction of training pairs: cross-lingual denoising examples and
//! pseudo many-to-many summarization samples with round-trip quality
//! filtering.
//!
//! A pseudo sample takes a document, selects its gap sentences, translates
//! them into the target language (skipped when the target equals the
//! document language), and emits a tagged input in which a configurable
//! share of the gap sentences is blanked out with `<mask-sent>`; the tagged
//! target is the gap sentences in document order. Any gap sentence whose
//! round-trip translation falls below the quality threshold discards the
//! whole sample.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gsg::select_gap_sentences;
use crate::noising::{sample_mask_ratio, text_infill, NoiseConfig};
use crate::provider::TranslationProvider;
use crate::rouge::rouge1_text;
use crate::textcore::{lang_tag, tokenize, Document, Language};

/// Sentence placeholder used when masking gap sentences in the input.
pub const MASK_SENT: &str = "<mask-sent>";

/// Which training objective an example belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TaskKind {
    /// Monolingual denoising (infilling + sentence permutation).
    #[serde(rename = "META_DENOISE")]
    MetaDenoise,
    /// Cross-lingual denoising over parallel sentence pairs.
    #[serde(rename = "XL_DENOISE")]
    XlDenoise,
    /// Pseudo many-to-many summarization sample.
    #[serde(rename = "PSEUDO_M2MS")]
    PseudoM2ms,
}

/// Provenance attached to an emitted example. Absent fields are omitted on
/// the wire.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExampleMeta {
    /// Source document identifier.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub doc_id: Option<String>,
    /// Gap ratio `k` used for selection.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    /// Selected gap sentence positions, ascending.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_indices: Option<Vec<usize>>,
    /// Per-gap-sentence round-trip scores (cross-lingual samples only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter_scores: Option<Vec<f64>>,
}

/// One emitted training pair. `src_text`/`tgt_text` both start with the
/// canonical tag of their language.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingExample {
    /// Model input, prefixed with the source-language tag.
    pub src_text: String,
    /// Expected output, prefixed with the target-language tag.
    pub tgt_text: String,
    /// Input language.
    pub src_lang: Language,
    /// Output language.
    pub tgt_lang: Language,
    /// Which objective produced this pair.
    pub task: TaskKind,
    /// Provenance fields.
    pub meta: ExampleMeta,
}

/// How many selected gap sentences get blanked in the input document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaskMode {
    /// Leave the input intact.
    #[serde(rename = "NONE")]
    None,
    /// Mask `floor(gaps / 2)` uniformly chosen gap sentences.
    #[serde(rename = "HALF")]
    Half,
    /// Mask every gap sentence.
    #[serde(rename = "ALL")]
    All,
}

/// Knobs for pseudo-sample construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PseudoConfig {
    /// Round-trip quality threshold λ; samples with any gap sentence
    /// scoring below it are discarded.
    pub lambda_threshold: f64,
    /// Gap ratios `k` drawn uniformly per document.
    pub k_choices: Vec<u32>,
    /// Input masking regime.
    pub mask_mode: MaskMode,
    /// Noising knobs used by the denoising stages.
    pub noise: NoiseConfig,
}

impl Default for PseudoConfig {
    fn default() -> Self {
        PseudoConfig {
            lambda_threshold: 0.7,
            k_choices: vec![5, 10, 15],
            mask_mode: MaskMode::Half,
            noise: NoiseConfig::default(),
        }
    }
}

impl PseudoConfig {
    /// Check the documented ranges.
    pub fn validate(&self) -> Result<(), Error> {
        if !(0.0..=1.0).contains(&self.lambda_threshold) {
            return Err(Error::InvalidConfig(format!(
                "lambda threshold must lie in [0, 1] (got {})",
                self.lambda_threshold
            )));
        }
        if self.k_choices.is_empty() || self.k_choices.contains(&0) {
            return Err(Error::InvalidConfig(
                "k choices must be a non-empty list of positive percentages".to_string(),
            ));
        }
        self.noise.validate()
    }
}

/// Build one cross-lingual denoising example from a parallel sentence pair:
/// the source side is tokenized and span-infilled, the target side is the
/// clean parallel sentence, and both are language-tagged.
pub fn build_xldn_example<R: Rng + ?Sized>(
    src_sentence: &str,
    tgt_sentence: &str,
    src: Language,
    tgt: Language,
    cfg: &NoiseConfig,
    rng: &mut R,
) -> Result<TrainingExample, Error> {
    if src == tgt {
        return Err(Error::SameLanguage(src));
    }
    let tokens = tokenize(src_sentence, src);
    if tokens.is_empty() || tgt_sentence.trim().is_empty() {
        return Err(Error::EmptyInput);
    }
    let ratio = sample_mask_ratio(cfg, rng);
    let noised = text_infill(&tokens, ratio, cfg, rng);
    Ok(TrainingExample {
        src_text: format!("{} {}", lang_tag(src), noised.join(" ")),
        tgt_text: format!("{} {}", lang_tag(tgt), tgt_sentence.trim()),
        src_lang: src,
        tgt_lang: tgt,
        task: TaskKind::XlDenoise,
        meta: ExampleMeta::default(),
    })
}

/// Outcome of round-tripping one sentence through the provider.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrip {
    /// Whether the sentence met the threshold.
    pub keep: bool,
    /// Forward translation (src → tgt), reused as the sample's target side.
    pub forward: String,
    /// ROUGE-1 F1 between the back-translation and the original, computed
    /// under the source language's tokenization.
    pub score: f64,
}

/// Translate forward then back and score fidelity against the original.
pub fn round_trip_check(
    sentence: &str,
    src: Language,
    tgt: Language,
    provider: &dyn TranslationProvider,
    lambda: f64,
) -> Result<RoundTrip, Error> {
    let wrap = |source| Error::Provider {
        context: sentence.to_string(),
        source,
    };
    if !provider.supports(src, tgt) || !provider.supports(tgt, src) {
        return Err(wrap(crate::error::ProviderError::UnsupportedPair(src, tgt)));
    }
    let forward = provider.translate(sentence, src, tgt).map_err(wrap)?;
    let back = provider.translate(&forward, tgt, src).map_err(wrap)?;
    let score = rouge1_text(&back, sentence, src).f1;
    Ok(RoundTrip {
        keep: score >= lambda,
        forward,
        score,
    })
}

/// Why a pseudo sample was dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscardedSample {
    /// Document the sample came from.
    pub doc_id: String,
    /// Gap ratio drawn for the document.
    pub k: u32,
    /// The gap selection that was being materialized.
    pub gap_indices: Vec<usize>,
    /// Round-trip score per gap sentence, in gap order.
    pub filter_scores: Vec<f64>,
}

/// Result of building one pseudo sample: either a training example or the
/// reason the whole sample was discarded.
#[derive(Debug, Clone, PartialEq)]
pub enum PseudoOutcome {
    /// All gap sentences passed the round-trip filter.
    Kept(Box<TrainingExample>),
    /// At least one gap sentence scored below λ.
    Discarded(DiscardedSample),
}

/// Build one pseudo many-to-many sample for `doc` targeting `tgt`.
///
/// Draws `k` uniformly from the configured choices, selects gap sentences,
/// round-trips each through the provider when `tgt` differs from the
/// document language (any failure below λ discards the whole sample), then
/// emits the tagged input with the configured share of gap sentences
/// replaced by [`MASK_SENT`] and the tagged target holding the gap
/// sentences in ascending document order.
pub fn build_pseudo_m2ms<R: Rng + ?Sized>(
    doc: &Document,
    tgt: Language,
    provider: &dyn TranslationProvider,
    cfg: &PseudoConfig,
    rng: &mut R,
) -> Result<PseudoOutcome, Error> {
    cfg.validate()?;
    if doc.sentences.len() < 2 {
        return Err(Error::DegenerateDocument(doc.id.clone()));
    }
    let k = cfg.k_choices[rng.gen_range(0..cfg.k_choices.len())];
    let selection = select_gap_sentences(doc, k)?;

    let cross_lingual = tgt != doc.lang;
    let mut targets = Vec::with_capacity(selection.gap_indices.len());
    let mut scores = Vec::new();
    if cross_lingual {
        for &gap in &selection.gap_indices {
            let rt = round_trip_check(
                &doc.sentences[gap].text,
                doc.lang,
                tgt,
                provider,
                cfg.lambda_threshold,
            )?;
            scores.push(rt.score);
            targets.push(rt.forward);
        }
        if scores.iter().any(|&s| s < cfg.lambda_threshold) {
            return Ok(PseudoOutcome::Discarded(DiscardedSample {
                doc_id: doc.id.clone(),
                k,
                gap_indices: selection.gap_indices,
                filter_scores: scores,
            }));
        }
    } else {
        targets.extend(
            selection
                .gap_indices
                .iter()
                .map(|&gap| doc.sentences[gap].text.clone()),
        );
    }

    let mask_count = match cfg.mask_mode {
        MaskMode::None => 0,
        MaskMode::Half => selection.gap_indices.len() / 2,
        MaskMode::All => selection.gap_indices.len(),
    };
    let masked_gaps: std::collections::HashSet<usize> =
        rand::seq::index::sample(rng, selection.gap_indices.len(), mask_count)
            .iter()
            .map(|pos| selection.gap_indices[pos])
            .collect();

    let input_parts: Vec<&str> = doc
        .sentences
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if masked_gaps.contains(&i) {
                MASK_SENT
            } else {
                s.text.as_str()
            }
        })
        .collect();

    let example = TrainingExample {
        src_text: format!("{} {}", lang_tag(doc.lang), input_parts.join(" ")),
        tgt_text: format!("{} {}", lang_tag(tgt), targets.join(" ")),
        src_lang: doc.lang,
        tgt_lang: tgt,
        task: TaskKind::PseudoM2ms,
        meta: ExampleMeta {
            doc_id: Some(doc.id.clone()),
            k: Some(k),
            gap_indices: Some(selection.gap_indices),
            filter_scores: cross_lingual.then_some(scores),
        },
    };
    Ok(PseudoOutcome::Kept(Box::new(example)))
}
