//! Summary evaluation: per-direction ROUGE means, language identification
//! with the correct-language rate, and embedding-drift analysis.

pub mod embedding;
pub mod langid;

use serde::{Deserialize, Serialize};

use crate::corpusops::Direction;
use crate::error::Error;
use crate::rouge::{rouge_l, rouge_n};
use crate::textcore::{tokenize, Language};

use langid::detect_language;

/// Aggregate scores for one summarization direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionReport {
    /// The evaluated (source, target) pair.
    pub direction: Direction,
    /// Number of scored candidate/reference pairs.
    pub n: usize,
    /// Mean unigram-overlap F1.
    pub rouge1: f64,
    /// Mean bigram-overlap F1.
    pub rouge2: f64,
    /// Mean longest-common-subsequence F1.
    #[serde(rename = "rougeL")]
    pub rouge_l: f64,
    /// Percentage of candidates detected as the target language.
    pub correct_lang_rate: f64,
}

/// One model prediction on the evaluation wire format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionRecord {
    /// Example identifier, carried through for auditing.
    pub id: String,
    /// Direction the candidate was generated for.
    pub direction: Direction,
    /// Model output.
    pub candidate: String,
    /// Gold summary.
    pub reference: String,
}

/// Percentage of candidates whose detected language equals `expected`.
///
/// Candidates that fail detection (empty or unclassifiable text) count as
/// incorrect.
pub fn correct_language_rate<S: AsRef<str>>(
    candidates: &[S],
    expected: Language,
) -> Result<f64, Error> {
    if candidates.is_empty() {
        return Err(Error::EmptyInput);
    }
    let correct = candidates
        .iter()
        .filter(|c| detect_language(c.as_ref()) == Ok(expected))
        .count();
    Ok(100.0 * correct as f64 / candidates.len() as f64)
}

/// Score (candidate, reference) pairs for one direction.
///
/// Both sides are tokenized in the target language's mode; the report
/// carries arithmetic means in pair order plus the correct-language rate
/// of the candidates against the target language.
pub fn evaluate_direction(
    direction: Direction,
    pairs: &[(String, String)],
) -> Result<DirectionReport, Error> {
    if pairs.is_empty() {
        return Err(Error::EmptyPairs);
    }
    let (mut sum1, mut sum2, mut sum_l) = (0.0f64, 0.0f64, 0.0f64);
    for (candidate, reference) in pairs {
        let cand = tokenize(candidate, direction.tgt);
        let reference = tokenize(reference, direction.tgt);
        sum1 += rouge_n(&cand, &reference, 1).f1;
        sum2 += rouge_n(&cand, &reference, 2).f1;
        sum_l += rouge_l(&cand, &reference).f1;
    }
    let candidates: Vec<&str> = pairs.iter().map(|(c, _)| c.as_str()).collect();
    let n = pairs.len();
    Ok(DirectionReport {
        direction,
        n,
        rouge1: sum1 / n as f64,
        rouge2: sum2 / n as f64,
        rouge_l: sum_l / n as f64,
        correct_lang_rate: correct_language_rate(&candidates, direction.tgt)?,
    })
}

/// Render reports as TSV grids, one block per metric, with source
/// languages as rows and target languages as columns. Missing directions
/// print as `-`.
pub fn render_tsv_grid(reports: &[DirectionReport]) -> String {
    let present: Vec<Language> = Language::ALL
        .iter()
        .copied()
        .filter(|&l| {
            reports
                .iter()
                .any(|r| r.direction.src == l || r.direction.tgt == l)
        })
        .collect();
    let lookup = |src: Language, tgt: Language| {
        reports
            .iter()
            .find(|r| r.direction.src == src && r.direction.tgt == tgt)
    };
    type MetricColumn = (&'static str, fn(&DirectionReport) -> String);
    let metrics: [MetricColumn; 4] = [
        ("rouge1", |r| format!("{:.4}", r.rouge1)),
        ("rouge2", |r| format!("{:.4}", r.rouge2)),
        ("rougeL", |r| format!("{:.4}", r.rouge_l)),
        ("correct_lang_rate", |r| {
            format!("{:.2}", r.correct_lang_rate)
        }),
    ];
    let mut out = String::new();
    for (block, (name, cell)) in metrics.iter().enumerate() {
        if block > 0 {
            out.push('\n');
        }
        out.push_str(name);
        for &tgt in &present {
            out.push('\t');
            out.push_str(tgt.code());
        }
        out.push('\n');
        for &src in &present {
            out.push_str(src.code());
            for &tgt in &present {
                out.push('\t');
                match lookup(src, tgt) {
                    Some(report) => out.push_str(&cell(report)),
                    None => out.push('-'),
                }
            }
            out.push('\n');
        }
    }
    out
}
