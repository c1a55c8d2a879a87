//! Language inventory, sentence segmentation, tokenization, and the
//! in-memory document model every other module consumes.
//!
//! Two tokenization regimes exist: whitespace-delimited languages are split
//! on word boundaries with edge punctuation peeled into separate tokens and
//! cased scripts lowercased; languages written without spaces (Chinese,
//! Thai) are tokenized one character at a time so that n-gram overlap
//! metrics stay meaningful.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The supported language inventory.
///
/// Codes are lowercase two-letter identifiers on the wire; [`Language::tag`]
/// yields the canonical control token prepended to model inputs. Extending
/// the inventory means adding a variant plus one row in each static table
/// below — `from_code` is the single parse boundary where unknown codes
/// surface as [`Error::UnsupportedLanguage`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    /// English
    En,
    /// French
    Fr,
    /// Hindi
    Hi,
    /// Chinese
    Zh,
    /// Thai
    Th,
    /// Turkish
    Tr,
}

/// How a language is chopped into tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenizationMode {
    /// Split on whitespace, peel edge punctuation, lowercase.
    Word,
    /// One token per non-whitespace character.
    Character,
}

impl Language {
    /// Every supported language, in canonical order.
    pub const ALL: [Language; 6] = [
        Language::En,
        Language::Fr,
        Language::Hi,
        Language::Zh,
        Language::Th,
        Language::Tr,
    ];

    /// Lowercase two-letter code used in wire formats.
    pub fn code(self) -> &'static str {
        match self {
            Language::En => "en",
            Language::Fr => "fr",
            Language::Hi => "hi",
            Language::Zh => "zh",
            Language::Th => "th",
            Language::Tr => "tr",
        }
    }

    /// Canonical control token for this language, e.g. `<En>`.
    pub fn tag(self) -> &'static str {
        match self {
            Language::En => "<En>",
            Language::Fr => "<Fr>",
            Language::Hi => "<Hi>",
            Language::Zh => "<Zh>",
            Language::Th => "<Th>",
            Language::Tr => "<Tr>",
        }
    }

    /// Tokenization regime for this language.
    pub fn tokenization(self) -> TokenizationMode {
        match self {
            Language::Zh | Language::Th => TokenizationMode::Character,
            _ => TokenizationMode::Word,
        }
    }

    /// Parse a (case-insensitive) two-letter code.
    pub fn from_code(code: &str) -> Result<Language, Error> {
        let lowered = code.trim().to_ascii_lowercase();
        Language::ALL
            .into_iter()
            .find(|lang| lang.code() == lowered)
            .ok_or_else(|| Error::UnsupportedLanguage(code.to_string()))
    }

    /// Reverse lookup of [`Language::tag`].
    pub fn from_tag(tag: &str) -> Option<Language> {
        Language::ALL.into_iter().find(|lang| lang.tag() == tag)
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Language::from_code(s)
    }
}

/// Canonical control token for a language (`<En>`, `<Zh>`, ...).
pub fn lang_tag(lang: Language) -> &'static str {
    lang.tag()
}

fn is_ascii_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_fullwidth_terminal(c: char) -> bool {
    matches!(c, '。' | '！' | '？')
}

/// Split `text` into sentences.
///
/// A sentence ends at `.`, `!` or `?` followed by whitespace or end of
/// text; for Chinese the fullwidth terminators `。！？` additionally end a
/// sentence without requiring trailing whitespace (runs of terminators stay
/// together). Thai carries no sentence punctuation in this scheme and is
/// split on newlines only. Inter-sentence whitespace is consumed; interior
/// whitespace is preserved; no output element is empty.
pub fn segment_sentences(text: &str, lang: Language) -> Vec<String> {
    if lang == Language::Th {
        return text
            .lines()
            .map(str::trim)
            .filter(|line| !line.is_empty())
            .map(str::to_string)
            .collect();
    }

    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        let next_is_terminal =
            next.is_some_and(|n| is_ascii_terminal(n) || is_fullwidth_terminal(n));
        let boundary = if lang == Language::Zh && is_fullwidth_terminal(c) {
            !next_is_terminal
        } else if is_ascii_terminal(c) {
            next.is_none_or(char::is_whitespace)
        } else {
            false
        };
        if boundary {
            push_trimmed(&chars[start..=i], &mut sentences);
            i += 1;
            while i < chars.len() && chars[i].is_whitespace() {
                i += 1;
            }
            start = i;
        } else {
            i += 1;
        }
    }
    if start < chars.len() {
        push_trimmed(&chars[start..], &mut sentences);
    }
    sentences
}

fn push_trimmed(chars: &[char], out: &mut Vec<String>) {
    let sentence: String = chars.iter().collect();
    let trimmed = sentence.trim();
    if !trimmed.is_empty() {
        out.push(trimmed.to_string());
    }
}

/// Everything that is neither alphanumeric nor whitespace counts as
/// punctuation for edge peeling. Combining marks (e.g. Devanagari vowel
/// signs) are alphabetic in Unicode and therefore stay attached.
fn is_edge_punct(c: char) -> bool {
    !c.is_alphanumeric()
}

/// Tokenize one sentence according to the language's regime.
///
/// Word mode splits on whitespace, peels leading/trailing punctuation
/// characters into separate tokens, and lowercases the core. Character mode
/// emits one token per non-whitespace character (lowercased where the
/// script has case). Deterministic, and idempotent at the token level
/// modulo lowercasing.
pub fn tokenize(sentence: &str, lang: Language) -> Vec<String> {
    match lang.tokenization() {
        TokenizationMode::Character => sentence
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| c.to_lowercase().collect())
            .collect(),
        TokenizationMode::Word => {
            let mut tokens = Vec::new();
            for chunk in sentence.split_whitespace() {
                let chars: Vec<char> = chunk.chars().collect();
                let mut a = 0;
                let mut b = chars.len();
                while a < b && is_edge_punct(chars[a]) {
                    a += 1;
                }
                while b > a && is_edge_punct(chars[b - 1]) {
                    b -= 1;
                }
                tokens.extend(chars[..a].iter().map(|c| c.to_string()));
                if a < b {
                    let core: String = chars[a..b].iter().collect();
                    tokens.push(core.to_lowercase());
                }
                tokens.extend(chars[b..].iter().map(|c| c.to_string()));
            }
            tokens
        }
    }
}

/// One sentence with its surface form and token list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    /// Trimmed surface text.
    pub text: String,
    /// Tokens under the owning document's language regime.
    pub tokens: Vec<String>,
}

/// A segmented, tokenized document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    /// Stable record identifier.
    pub id: String,
    /// Language all sentences share.
    pub lang: Language,
    /// Sentences in reading order; each has at least one token.
    pub sentences: Vec<Sentence>,
}

impl Document {
    /// Segment and tokenize raw text into a document.
    pub fn from_text(id: impl Into<String>, lang: Language, text: &str) -> Document {
        let sentences = segment_sentences(text, lang);
        Document::from_sentences(id, lang, sentences)
    }

    /// Build a document from pre-segmented sentences. Sentences that
    /// tokenize to nothing are dropped so every kept sentence has ≥ 1 token.
    pub fn from_sentences(
        id: impl Into<String>,
        lang: Language,
        sentences: Vec<String>,
    ) -> Document {
        let sentences = sentences
            .into_iter()
            .filter_map(|text| {
                let tokens = tokenize(&text, lang);
                if tokens.is_empty() {
                    None
                } else {
                    Some(Sentence {
                        text: text.trim().to_string(),
                        tokens,
                    })
                }
            })
            .collect();
        Document {
            id: id.into(),
            lang,
            sentences,
        }
    }

    /// Total token count across sentences.
    pub fn total_tokens(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }

    /// Surface texts joined with single spaces.
    pub fn joined_text(&self) -> String {
        let parts: Vec<&str> = self.sentences.iter().map(|s| s.text.as_str()).collect();
        parts.join(" ")
    }
}

/// Wire record for raw (unsegmented) documents: `{"id","lang","text"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDocRecord {
    /// Stable record identifier.
    pub id: String,
    /// Document language.
    pub lang: Language,
    /// Raw text.
    pub text: String,
}

/// Wire record for segmented documents: `{"id","lang","sentences"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentedDocRecord {
    /// Stable record identifier.
    pub id: String,
    /// Document language.
    pub lang: Language,
    /// Sentences in reading order.
    pub sentences: Vec<String>,
}

impl From<&Document> for SegmentedDocRecord {
    fn from(doc: &Document) -> Self {
        SegmentedDocRecord {
            id: doc.id.clone(),
            lang: doc.lang,
            sentences: doc.sentences.iter().map(|s| s.text.clone()).collect(),
        }
    }
}

impl SegmentedDocRecord {
    /// Re-tokenize into the in-memory model.
    pub fn into_document(self) -> Document {
        Document::from_sentences(self.id, self.lang, self.sentences)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_are_canonical_and_bijective() {
        let mut seen = std::collections::HashSet::new();
        for lang in Language::ALL {
            assert!(seen.insert(lang.tag()), "duplicate tag {}", lang.tag());
            assert_eq!(Language::from_tag(lang.tag()), Some(lang));
            assert_eq!(Language::from_code(lang.code()).unwrap(), lang);
        }
        assert_eq!(Language::En.tag(), "<En>");
        assert_eq!(Language::Zh.tag(), "<Zh>");
    }

    #[test]
    fn unknown_code_is_rejected() {
        match Language::from_code("xx") {
            Err(Error::UnsupportedLanguage(code)) => assert_eq!(code, "xx"),
            other => panic!("expected UnsupportedLanguage, got {other:?}"),
        }
    }

    #[test]
    fn segments_on_terminal_punctuation_before_whitespace() {
        assert_eq!(
            segment_sentences("Hello. World!", Language::En),
            vec!["Hello.", "World!"]
        );
    }

    #[test]
    fn empty_text_yields_no_sentences() {
        assert!(segment_sentences("", Language::En).is_empty());
        assert!(segment_sentences("   \n ", Language::En).is_empty());
    }

    #[test]
    fn chinese_fullwidth_terminators_split_without_whitespace() {
        assert_eq!(
            segment_sentences("你好。再见。", Language::Zh),
            vec!["你好。", "再见。"]
        );
    }

    #[test]
    fn period_without_whitespace_does_not_split() {
        // Abbreviation-style interior periods survive.
        assert_eq!(
            segment_sentences("Version 2.5 shipped. Done.", Language::En),
            vec!["Version 2.5 shipped.", "Done."]
        );
    }

    #[test]
    fn trailing_fragment_without_terminator_is_kept() {
        assert_eq!(
            segment_sentences("One. two three", Language::En),
            vec!["One.", "two three"]
        );
    }

    #[test]
    fn consecutive_terminators_stay_in_one_sentence() {
        assert_eq!(
            segment_sentences("What?! Really.", Language::En),
            vec!["What?!", "Really."]
        );
        assert_eq!(
            segment_sentences("好了！！走吧。", Language::Zh),
            vec!["好了！！", "走吧。"]
        );
    }

    #[test]
    fn thai_splits_on_newlines_only() {
        assert_eq!(
            segment_sentences("สวัสดีครับ\nลาก่อน", Language::Th),
            vec!["สวัสดีครับ", "ลาก่อน"]
        );
        // No punctuation-based split for Thai.
        assert_eq!(
            segment_sentences("abc. def", Language::Th),
            vec!["abc. def"]
        );
    }

    #[test]
    fn segmentation_round_trips_with_single_space_joins() {
        let text = "The cat sat. The dog ran! Did it? Yes.";
        let sentences = segment_sentences(text, Language::En);
        assert_eq!(sentences.join(" "), text);

        let thai = "หนึ่ง\nสอง\nสาม";
        assert_eq!(segment_sentences(thai, Language::Th).join("\n"), thai);
    }

    #[test]
    fn interior_whitespace_is_preserved() {
        assert_eq!(
            segment_sentences("Hello  twice. Bye.", Language::En),
            vec!["Hello  twice.", "Bye."]
        );
    }

    #[test]
    fn word_tokenization_peels_edge_punctuation_and_lowercases() {
        assert_eq!(tokenize("The cat.", Language::En), vec!["the", "cat", "."]);
        assert_eq!(
            tokenize("\"Voilà!\"", Language::Fr),
            vec!["\"", "voilà", "!", "\""]
        );
        // Interior apostrophes stay attached.
        assert_eq!(tokenize("s'est", Language::Fr), vec!["s'est"]);
    }

    #[test]
    fn character_tokenization_is_one_token_per_char() {
        assert_eq!(tokenize("你好", Language::Zh), vec!["你", "好"]);
        assert_eq!(tokenize("你 好", Language::Zh), vec!["你", "好"]);
        assert!(tokenize("", Language::Zh).is_empty());
    }

    #[test]
    fn empty_sentence_tokenizes_to_nothing() {
        assert!(tokenize("", Language::En).is_empty());
        assert!(tokenize("   ", Language::En).is_empty());
    }

    #[test]
    fn devanagari_vowel_signs_are_not_peeled() {
        // U+0940 is a combining vowel sign; it must stay inside the token.
        assert_eq!(tokenize("की ।", Language::Hi), vec!["की", "।"]);
    }

    #[test]
    fn tokenize_is_idempotent_modulo_lowercasing() {
        for lang in [Language::En, Language::Zh] {
            for token in tokenize("The cat sat. 你好", lang) {
                assert_eq!(tokenize(&token, lang), vec![token.clone()]);
            }
        }
    }

    #[test]
    fn document_drops_tokenless_sentences() {
        let doc = Document::from_sentences(
            "d1",
            Language::En,
            vec!["One two.".into(), "".into(), "Three.".into()],
        );
        assert_eq!(doc.sentences.len(), 2);
        assert!(doc.sentences.iter().all(|s| !s.tokens.is_empty()));
        assert_eq!(doc.total_tokens(), 5);
    }

    #[test]
    fn wire_records_round_trip() {
        let raw: RawDocRecord =
            serde_json::from_str(r#"{"id":"a","lang":"zh","text":"你好。"}"#).unwrap();
        assert_eq!(raw.lang, Language::Zh);
        let doc = Document::from_text(raw.id, raw.lang, &raw.text);
        let seg = SegmentedDocRecord::from(&doc);
        let json = serde_json::to_string(&seg).unwrap();
        assert_eq!(json, r#"{"id":"a","lang":"zh","sentences":["你好。"]}"#);
    }
}
