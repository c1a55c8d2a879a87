//! Two-tier language identification.
//!
//! Tier one is script detection: when at least half of the non-whitespace
//! characters fall in a script used by exactly one supported language
//! (Devanagari → Hi, Han → Zh, Thai → Th), that language is returned
//! directly. Tier two separates the Latin-script languages (En, Fr, Tr) by
//! cosine similarity between the text's character-trigram counts and
//! bundled per-language frequency profiles. Ties go to the language listed
//! first in the profile manifest.
//!
//! The profiles are plain `trigram<TAB>count` files regenerable from the
//! bundled seed word lists (see [`build_profile_text`] and the
//! `regen-profiles` CLI command), which keeps the classifier auditable.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::error::Error;
use crate::textcore::Language;

/// Priority-ordered list of Latin-script profile languages.
const PROFILE_MANIFEST: &str = include_str!("../../data/profiles/manifest.txt");
const PROFILE_EN: &str = include_str!("../../data/profiles/en.profile");
const PROFILE_FR: &str = include_str!("../../data/profiles/fr.profile");
const PROFILE_TR: &str = include_str!("../../data/profiles/tr.profile");

const SEED_EN: &str = include_str!("../../data/seeds/en.txt");
const SEED_FR: &str = include_str!("../../data/seeds/fr.txt");
const SEED_TR: &str = include_str!("../../data/seeds/tr.txt");

/// A trigram count table with its precomputed Euclidean norm.
#[derive(Debug, Clone)]
pub struct Profile {
    counts: BTreeMap<String, u64>,
    norm: f64,
}

impl Profile {
    /// Build a profile from raw trigram counts.
    pub fn from_counts(counts: BTreeMap<String, u64>) -> Profile {
        let norm = counts
            .values()
            .map(|&c| (c as f64) * (c as f64))
            .sum::<f64>()
            .sqrt();
        Profile { counts, norm }
    }

    /// Parse the `trigram<TAB>count` file format.
    pub fn parse(text: &str) -> Result<Profile, Error> {
        let mut counts = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (gram, count) = line.split_once('\t').ok_or_else(|| {
                Error::Parse(format!("profile line {}: missing tab", lineno + 1))
            })?;
            let count: u64 = count.parse().map_err(|_| {
                Error::Parse(format!("profile line {}: bad count {count:?}", lineno + 1))
            })?;
            counts.insert(gram.to_string(), count);
        }
        Ok(Profile::from_counts(counts))
    }

    /// Cosine similarity against another count table; 0.0 when either
    /// side is empty.
    fn cosine(&self, other: &BTreeMap<String, u64>) -> f64 {
        if self.norm == 0.0 {
            return 0.0;
        }
        let other_norm = other
            .values()
            .map(|&c| (c as f64) * (c as f64))
            .sum::<f64>()
            .sqrt();
        if other_norm == 0.0 {
            return 0.0;
        }
        let dot: f64 = other
            .iter()
            .filter_map(|(gram, &c)| {
                self.counts
                    .get(gram)
                    .map(|&p| (p as f64) * (c as f64))
            })
            .sum();
        dot / (self.norm * other_norm)
    }
}

/// Character trigrams of the text's alphabetic runs, each run padded with
/// a leading and trailing space, lowercased.
pub fn trigram_counts(text: &str) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    let lowered = text.to_lowercase();
    let mut run: Vec<char> = Vec::new();
    let flush = |run: &mut Vec<char>, counts: &mut BTreeMap<String, u64>| {
        if run.is_empty() {
            return;
        }
        let mut padded = Vec::with_capacity(run.len() + 2);
        padded.push(' ');
        padded.append(run);
        padded.push(' ');
        for window in padded.windows(3) {
            *counts.entry(window.iter().collect()).or_insert(0) += 1;
        }
    };
    for c in lowered.chars() {
        if c.is_alphabetic() {
            run.push(c);
        } else {
            flush(&mut run, &mut counts);
        }
    }
    flush(&mut run, &mut counts);
    counts
}

/// Render a seed word list (one word per line) into the profile file
/// format: `trigram<TAB>count` lines sorted by trigram.
pub fn build_profile_text(seed_words: &str) -> String {
    let mut counts = BTreeMap::new();
    for word in seed_words.lines() {
        let word = word.trim();
        if word.is_empty() {
            continue;
        }
        for (gram, n) in trigram_counts(word) {
            *counts.entry(gram).or_insert(0) += n;
        }
    }
    let mut out = String::new();
    for (gram, n) in counts {
        out.push_str(&gram);
        out.push('\t');
        out.push_str(&n.to_string());
        out.push('\n');
    }
    out
}

/// The bundled seed word list used to build a language's trigram profile,
/// if that language is classified by profile (En, Fr, Tr).
pub fn seed_corpus(lang: Language) -> Option<&'static str> {
    match lang {
        Language::En => Some(SEED_EN),
        Language::Fr => Some(SEED_FR),
        Language::Tr => Some(SEED_TR),
        _ => None,
    }
}

fn bundled_profile_text(lang: Language) -> Option<&'static str> {
    match lang {
        Language::En => Some(PROFILE_EN),
        Language::Fr => Some(PROFILE_FR),
        Language::Tr => Some(PROFILE_TR),
        _ => None,
    }
}

/// Languages classified by trigram profile, in manifest priority order.
pub fn profile_languages() -> &'static [Language] {
    static LANGS: OnceLock<Vec<Language>> = OnceLock::new();
    LANGS.get_or_init(|| {
        PROFILE_MANIFEST
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|code| {
                Language::from_code(code.trim()).expect("bundled manifest lists known languages")
            })
            .collect()
    })
}

fn bundled_profiles() -> &'static [(Language, Profile)] {
    static PROFILES: OnceLock<Vec<(Language, Profile)>> = OnceLock::new();
    PROFILES.get_or_init(|| {
        profile_languages()
            .iter()
            .map(|&lang| {
                let text =
                    bundled_profile_text(lang).expect("manifest languages have bundled profiles");
                let profile = Profile::parse(text).expect("bundled profile is well-formed");
                (lang, profile)
            })
            .collect()
    })
}

/// Identify the language of a text.
///
/// Returns [`Error::EmptyText`] for whitespace-only input and
/// [`Error::Unclassifiable`] when no profile similarity exceeds zero
/// (for example, digits-only text).
pub fn detect_language(text: &str) -> Result<Language, Error> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(Error::EmptyText);
    }
    let mut total = 0usize;
    let (mut devanagari, mut han, mut thai) = (0usize, 0usize, 0usize);
    for c in trimmed.chars().filter(|c| !c.is_whitespace()) {
        total += 1;
        match c as u32 {
            0x0900..=0x097F => devanagari += 1,
            0x4E00..=0x9FFF | 0x3400..=0x4DBF => han += 1,
            0x0E00..=0x0E7F => thai += 1,
            _ => {}
        }
    }
    if 2 * devanagari >= total {
        return Ok(Language::Hi);
    }
    if 2 * han >= total {
        return Ok(Language::Zh);
    }
    if 2 * thai >= total {
        return Ok(Language::Th);
    }

    let counts = trigram_counts(trimmed);
    let mut best: Option<(Language, f64)> = None;
    for (lang, profile) in bundled_profiles() {
        let similarity = profile.cosine(&counts);
        // Strict inequality keeps the earlier manifest language on ties.
        if best.is_none_or(|(_, b)| similarity > b) {
            best = Some((*lang, similarity));
        }
    }
    match best {
        Some((lang, similarity)) if similarity > 0.0 => Ok(lang),
        _ => Err(Error::Unclassifiable),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unique_scripts_win_directly() {
        assert_eq!(detect_language("สวัสดี"), Ok(Language::Th));
        assert_eq!(detect_language("你好世界"), Ok(Language::Zh));
        assert_eq!(detect_language("नमस्ते दुनिया"), Ok(Language::Hi));
    }

    #[test]
    fn script_threshold_is_half_of_non_whitespace() {
        // Two Han characters out of four non-whitespace → exactly 50%.
        assert_eq!(detect_language("你好 ab"), Ok(Language::Zh));
        // One Han character out of four → falls through to trigram tier.
        assert_eq!(detect_language("你 the and of"), Ok(Language::En));
    }

    #[test]
    fn empty_and_unclassifiable_inputs_error() {
        assert_eq!(detect_language("   "), Err(Error::EmptyText));
        assert_eq!(detect_language("12345 67"), Err(Error::Unclassifiable));
    }

    #[test]
    fn trigram_counts_pad_each_alphabetic_run() {
        let counts = trigram_counts("ab, cd");
        // " ab " → " ab", "ab "; " cd " → " cd", "cd ".
        assert_eq!(counts.get(" ab").copied(), Some(1));
        assert_eq!(counts.get("ab ").copied(), Some(1));
        assert_eq!(counts.get(" cd").copied(), Some(1));
        assert_eq!(counts.get("cd ").copied(), Some(1));
        assert_eq!(counts.len(), 4);
    }

    #[test]
    fn latin_languages_separate_on_common_phrases() {
        assert_eq!(
            detect_language("the people of this country have always been here"),
            Ok(Language::En)
        );
        assert_eq!(
            detect_language("les gens de ce pays étaient toujours ici avec nous"),
            Ok(Language::Fr)
        );
        assert_eq!(
            detect_language("bu ülkenin insanları her zaman buradaydı ve çok güzeldi"),
            Ok(Language::Tr)
        );
    }

    #[test]
    fn long_french_passage_classifies_as_french() {
        // ≈200 characters assembled from the bundled French seed corpus.
        let words: Vec<&str> = SEED_FR.lines().collect();
        let mut passage = String::new();
        let mut i = 7usize;
        while passage.chars().count() < 200 {
            passage.push_str(words[i % words.len()]);
            passage.push(' ');
            i = i.wrapping_mul(31).wrapping_add(17);
        }
        assert_eq!(detect_language(&passage), Ok(Language::Fr));
    }

    #[test]
    fn manifest_orders_the_profile_languages() {
        assert_eq!(
            profile_languages(),
            &[Language::En, Language::Fr, Language::Tr]
        );
    }

    #[test]
    fn bundled_profiles_match_seed_regeneration() {
        for &lang in profile_languages() {
            let seeds = seed_corpus(lang).expect("profile languages ship seed corpora");
            let regenerated = build_profile_text(seeds);
            let bundled = bundled_profile_text(lang).unwrap();
            assert_eq!(
                bundled,
                regenerated,
                "bundled {} profile is stale; run the ignored regenerate_bundled_profiles test",
                lang.code()
            );
        }
    }

    /// Maintenance helper: rewrites the bundled profile files from the
    /// seed corpora. Run with `cargo test -- --ignored regenerate`.
    #[test]
    #[ignore = "writes into the source tree"]
    fn regenerate_bundled_profiles() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data/profiles");
        for &lang in profile_languages() {
            let seeds = seed_corpus(lang).unwrap();
            let path = format!("{dir}/{}.profile", lang.code());
            std::fs::write(&path, build_profile_text(seeds)).unwrap();
        }
    }
}
