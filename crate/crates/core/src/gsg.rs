//! Gap sentence selection: picks the most "summary-like" sentences of a
//! document by scoring each sentence's ROUGE-1 F1 against the rest of the
//! document, then greedily filling a token budget in rank order.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rouge::rouge_n;
use crate::textcore::Document;

/// Result of gap selection over one document.
///
/// Invariants: `1 ≤ gaps.len() ≤ sentences − 1`, `gaps` strictly ascending,
/// and the selected token mass reaches `budget` unless the all-but-one cap
/// stopped selection first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSelection {
    /// Document this selection belongs to.
    #[serde(rename = "id")]
    pub doc_id: String,
    /// The percentage `k` the budget was derived from.
    #[serde(rename = "k")]
    pub ratio_k: u32,
    /// `ceil(k/100 × total tokens)`.
    #[serde(rename = "budget")]
    pub token_budget: usize,
    /// Selected sentence positions, ascending.
    #[serde(rename = "gaps")]
    pub gap_indices: Vec<usize>,
    /// Importance score of every document sentence, by position.
    pub scores: Vec<f64>,
}

/// ROUGE-1 F1 of sentence `index` against the concatenated tokens of all
/// other sentences.
pub fn sentence_importance(doc: &Document, index: usize) -> Result<f64, Error> {
    if doc.sentences.len() < 2 {
        return Err(Error::DegenerateDocument(doc.id.clone()));
    }
    if index >= doc.sentences.len() {
        return Err(Error::IndexOutOfRange {
            index,
            len: doc.sentences.len(),
        });
    }
    let rest: Vec<&str> = doc
        .sentences
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != index)
        .flat_map(|(_, s)| s.tokens.iter().map(String::as_str))
        .collect();
    Ok(rouge_n(&doc.sentences[index].tokens, &rest, 1).f1)
}

/// Select gap sentences for `doc` with gap ratio `k_percent`.
///
/// The token budget is `ceil(k/100 × total tokens)`. Sentences are ranked
/// by importance (ties favor the earlier position) and taken greedily until
/// the budget is met; at least one sentence is always selected and at least
/// one always remains.
pub fn select_gap_sentences(doc: &Document, k_percent: u32) -> Result<GapSelection, Error> {
    if k_percent == 0 {
        return Err(Error::InvalidConfig(
            "gap ratio k must be positive".to_string(),
        ));
    }
    let len = doc.sentences.len();
    if len < 2 {
        return Err(Error::DegenerateDocument(doc.id.clone()));
    }
    let total = doc.total_tokens();
    // ceil(k * total / 100) in exact integer arithmetic.
    let token_budget = (k_percent as usize * total).div_ceil(100);

    let scores: Vec<f64> = (0..len)
        .map(|i| sentence_importance(doc, i))
        .collect::<Result<_, _>>()?;

    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));

    let mut gap_indices = Vec::new();
    let mut covered = 0usize;
    for idx in order {
        if gap_indices.len() == len - 1 {
            break;
        }
        gap_indices.push(idx);
        covered += doc.sentences[idx].tokens.len();
        if covered >= token_budget {
            break;
        }
    }
    gap_indices.sort_unstable();

    Ok(GapSelection {
        doc_id: doc.id.clone(),
        ratio_k: k_percent,
        token_budget,
        gap_indices,
        scores,
    })
}
