//! Subcommand implementations. Every command reads JSONL from the
//! resolved input path, writes its outputs, and returns an [`Outcome`]
//! from which the caller assembles the run manifest.
//!
//! Reproducibility contract: all randomness comes from
//! `record_rng(global_seed, stable_record_key)`, records are processed by
//! a worker pool but collected in input order, and nothing time- or
//! thread-dependent reaches an output file — identical (config, seed,
//! inputs) produce byte-identical outputs at any `--jobs` value.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use m2ms_core::corpusops::{
    crosssum_split, direction_weights, split_m2ms, DatasetSplit, Direction, DirectionSplit,
    ParallelCluster, SamplerConfig, SplitExample, SplitKind, SplitTargets,
};
use m2ms_core::evalkit::embedding::{drift_analysis, EmbeddingSet};
use m2ms_core::evalkit::langid::{
    build_profile_text, detect_language, profile_languages, seed_corpus,
};
use m2ms_core::evalkit::{evaluate_direction, render_tsv_grid, DirectionReport, PredictionRecord};
use m2ms_core::gsg::{select_gap_sentences, GapSelection};
use m2ms_core::noising::{permute_sentences, sample_mask_ratio, text_infill};
use m2ms_core::provider::{HttpProvider, MockProvider, TranslationProvider, PROVIDER_URL_ENV};
use m2ms_core::pseudogen::{
    build_pseudo_m2ms, build_xldn_example, ExampleMeta, PseudoOutcome, TaskKind, TrainingExample,
};
use m2ms_core::seeding::record_rng;
use m2ms_core::textcore::{lang_tag, Document, Language, RawDocRecord, SegmentedDocRecord};

use crate::config::{ProviderKind, RunConfig};
use crate::failure::Failure;
use crate::jsonl::{read_jsonl, sha256_file, to_jsonl, write_output};
use crate::manifest::InputDigest;

/// Cap on itemized warnings; the overflow is summarized in one line.
const MAX_WARNINGS: usize = 20;

/// What a command reports back for the run manifest.
#[derive(Debug, Default)]
pub struct Outcome {
    /// Digests of the files the command read.
    pub inputs: Vec<InputDigest>,
    /// Per-stage record counts.
    pub counts: BTreeMap<String, u64>,
    /// Leakage-scan result, for splitting commands.
    pub violations: Option<u64>,
    /// Non-fatal anomalies.
    pub warnings: Vec<String>,
}

impl Outcome {
    fn count(&mut self, key: &str, value: usize) {
        self.counts.insert(key.to_string(), value as u64);
    }

    fn finish_warnings(&mut self) {
        if self.warnings.len() > MAX_WARNINGS {
            let extra = self.warnings.len() - MAX_WARNINGS;
            self.warnings.truncate(MAX_WARNINGS);
            self.warnings.push(format!("... and {extra} more"));
        }
    }
}

fn digest_input(path: &Path) -> Result<InputDigest, Failure> {
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: sha256_file(path)?,
    })
}

/// The flat split wire record: one example with its direction, split
/// label, and originating cluster.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitFileRecord {
    pub direction: Direction,
    pub split: SplitKind,
    pub cluster_id: String,
    pub document: String,
    pub summary: String,
}

fn flatten_dataset(dataset: &DatasetSplit) -> Vec<SplitFileRecord> {
    let mut records = Vec::new();
    for (&direction, lists) in &dataset.directions {
        for (split, examples) in [
            (SplitKind::Train, &lists.train),
            (SplitKind::Validation, &lists.validation),
            (SplitKind::Test, &lists.test),
        ] {
            for example in examples {
                records.push(SplitFileRecord {
                    direction,
                    split,
                    cluster_id: example.cluster_id.clone(),
                    document: example.document.clone(),
                    summary: example.summary.clone(),
                });
            }
        }
    }
    records
}

fn split_totals(dataset: &DatasetSplit) -> (usize, usize, usize) {
    dataset.directions.values().fold((0, 0, 0), |acc, lists| {
        (
            acc.0 + lists.train.len(),
            acc.1 + lists.validation.len(),
            acc.2 + lists.test.len(),
        )
    })
}

fn build_provider(config: &RunConfig) -> Result<Arc<dyn TranslationProvider>, Failure> {
    match config.provider.kind {
        ProviderKind::Mock => Ok(Arc::new(MockProvider::identity())),
        ProviderKind::Http => {
            let env_url = std::env::var(PROVIDER_URL_ENV)
                .ok()
                .filter(|u| !u.trim().is_empty());
            let url = env_url
                .or_else(|| config.provider.url.clone())
                .ok_or_else(|| {
                    Failure::input(anyhow::anyhow!(
                        "http provider selected but neither {PROVIDER_URL_ENV} nor provider.url is set"
                    ))
                })?;
            Ok(Arc::new(HttpProvider::new(url.trim())))
        }
    }
}

/// `segment`: raw documents to sentence records.
pub fn segment(config: &RunConfig) -> Result<Outcome, Failure> {
    let input = config.input_path()?;
    let out = config.output_path()?;
    let records: Vec<RawDocRecord> = read_jsonl(input)?;
    let segmented: Vec<SegmentedDocRecord> = records
        .par_iter()
        .map(|r| SegmentedDocRecord::from(&Document::from_text(r.id.clone(), r.lang, &r.text)))
        .collect();
    write_output(out, &to_jsonl(&segmented))?;
    let mut outcome = Outcome::default();
    outcome.inputs.push(digest_input(input)?);
    outcome.count("input", records.len());
    outcome.count("segmented", segmented.len());
    Ok(outcome)
}

enum GsgRow {
    Selected(GapSelection),
    Skipped(String),
}

/// `gsg`: per-document gap-sentence selection with a per-record `k` draw.
pub fn gsg(config: &RunConfig) -> Result<Outcome, Failure> {
    config.pseudo.validate().map_err(Failure::from_core)?;
    let input = config.input_path()?;
    let out = config.output_path()?;
    let records: Vec<SegmentedDocRecord> = read_jsonl(input)?;
    let total = records.len();
    let rows: Vec<Result<GsgRow, m2ms_core::Error>> = records
        .into_par_iter()
        .map(|record| {
            let doc = record.into_document();
            if doc.sentences.len() < 2 {
                return Ok(GsgRow::Skipped(doc.id));
            }
            let mut rng = record_rng(config.global_seed, &format!("gsg:{}", doc.id));
            let k = config.pseudo.k_choices[rng.gen_range(0..config.pseudo.k_choices.len())];
            select_gap_sentences(&doc, k).map(GsgRow::Selected)
        })
        .collect();
    let mut outcome = Outcome::default();
    outcome.inputs.push(digest_input(input)?);
    let mut selections = Vec::new();
    let mut skipped = 0usize;
    for row in rows {
        match row.map_err(Failure::from_core)? {
            GsgRow::Selected(selection) => selections.push(selection),
            GsgRow::Skipped(id) => {
                skipped += 1;
                outcome
                    .warnings
                    .push(format!("doc {id}: fewer than two sentences; skipped"));
            }
        }
    }
    write_output(out, &to_jsonl(&selections))?;
    outcome.count("input", total);
    outcome.count("selected", selections.len());
    outcome.count("skipped", skipped);
    outcome.finish_warnings();
    Ok(outcome)
}

enum ExampleRow {
    Kept(Box<TrainingExample>),
    Skipped(String),
}

/// `noise-meta`: monolingual denoising pairs — sentence permutation plus
/// span infilling on the input side, the original document on the target
/// side, both language-tagged.
pub fn noise_meta(config: &RunConfig) -> Result<Outcome, Failure> {
    config.noise.validate().map_err(Failure::from_core)?;
    let input = config.input_path()?;
    let out = config.output_path()?;
    let records: Vec<SegmentedDocRecord> = read_jsonl(input)?;
    let total = records.len();
    let rows: Vec<ExampleRow> = records
        .into_par_iter()
        .map(|record| {
            let doc = record.into_document();
            if doc.total_tokens() == 0 {
                return ExampleRow::Skipped(format!("doc {}: no tokens; skipped", doc.id));
            }
            let mut rng = record_rng(config.global_seed, &format!("meta:{}", doc.id));
            let permuted = permute_sentences(&doc, &mut rng);
            let tokens: Vec<&str> = permuted
                .sentences
                .iter()
                .flat_map(|s| s.tokens.iter().map(String::as_str))
                .collect();
            let ratio = sample_mask_ratio(&config.noise, &mut rng);
            let noised = text_infill(&tokens, ratio, &config.noise, &mut rng);
            ExampleRow::Kept(Box::new(TrainingExample {
                src_text: format!("{} {}", lang_tag(doc.lang), noised.join(" ")),
                tgt_text: format!("{} {}", lang_tag(doc.lang), doc.joined_text()),
                src_lang: doc.lang,
                tgt_lang: doc.lang,
                task: TaskKind::MetaDenoise,
                meta: ExampleMeta {
                    doc_id: Some(doc.id.clone()),
                    ..ExampleMeta::default()
                },
            }))
        })
        .collect();
    let mut outcome = Outcome::default();
    outcome.inputs.push(digest_input(input)?);
    let mut examples = Vec::new();
    let mut skipped = 0usize;
    for row in rows {
        match row {
            ExampleRow::Kept(example) => examples.push(*example),
            ExampleRow::Skipped(warning) => {
                skipped += 1;
                outcome.warnings.push(warning);
            }
        }
    }
    write_output(out, &to_jsonl(&examples))?;
    outcome.count("input", total);
    outcome.count("kept", examples.len());
    outcome.count("skipped", skipped);
    outcome.finish_warnings();
    Ok(outcome)
}

/// Input record for `make-xldn`: a parallel sentence pair.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct XldnRecord {
    id: String,
    src_lang: Language,
    tgt_lang: Language,
    src: String,
    tgt: String,
}

/// `make-xldn`: cross-lingual denoising pairs from parallel sentences.
pub fn make_xldn(config: &RunConfig) -> Result<Outcome, Failure> {
    config.noise.validate().map_err(Failure::from_core)?;
    let input = config.input_path()?;
    let out = config.output_path()?;
    let records: Vec<XldnRecord> = read_jsonl(input)?;
    let total = records.len();
    let rows: Vec<Result<ExampleRow, m2ms_core::Error>> = records
        .par_iter()
        .map(|record| {
            let mut rng = record_rng(config.global_seed, &format!("xldn:{}", record.id));
            match build_xldn_example(
                &record.src,
                &record.tgt,
                record.src_lang,
                record.tgt_lang,
                &config.noise,
                &mut rng,
            ) {
                Ok(mut example) => {
                    example.meta.doc_id = Some(record.id.clone());
                    Ok(ExampleRow::Kept(Box::new(example)))
                }
                Err(err @ (m2ms_core::Error::SameLanguage(_) | m2ms_core::Error::EmptyInput)) => {
                    Ok(ExampleRow::Skipped(format!("pair {}: {err}; skipped", record.id)))
                }
                Err(other) => Err(other),
            }
        })
        .collect();
    let mut outcome = Outcome::default();
    outcome.inputs.push(digest_input(input)?);
    let mut examples = Vec::new();
    let mut skipped = 0usize;
    for row in rows {
        match row.map_err(Failure::from_core)? {
            ExampleRow::Kept(example) => examples.push(*example),
            ExampleRow::Skipped(warning) => {
                skipped += 1;
                outcome.warnings.push(warning);
            }
        }
    }
    write_output(out, &to_jsonl(&examples))?;
    outcome.count("input", total);
    outcome.count("kept", examples.len());
    outcome.count("skipped", skipped);
    outcome.finish_warnings();
    Ok(outcome)
}

enum M2msRow {
    Kept(Box<TrainingExample>),
    Discarded,
    Skipped(String),
}

/// `make-m2ms`: pseudo summarization pairs for every (document, target
/// language) combination, with round-trip filtering through the provider.
pub fn make_m2ms(config: &RunConfig) -> Result<Outcome, Failure> {
    config.pseudo.validate().map_err(Failure::from_core)?;
    if config.languages.is_empty() {
        return Err(Failure::input(anyhow::anyhow!(
            "config.languages must list at least one target language"
        )));
    }
    let provider = build_provider(config)?;
    let input = config.input_path()?;
    let out = config.output_path()?;
    let records: Vec<SegmentedDocRecord> = read_jsonl(input)?;
    let docs: Vec<Document> = records.into_iter().map(|r| r.into_document()).collect();
    let targets = &config.languages;
    let rows: Vec<Result<M2msRow, m2ms_core::Error>> = docs
        .par_iter()
        .flat_map_iter(|doc| {
            let provider = &provider;
            targets.iter().map(move |&tgt| {
                if doc.sentences.len() < 2 {
                    return Ok(M2msRow::Skipped(format!(
                        "doc {}: fewer than two sentences; skipped for {}",
                        doc.id,
                        tgt.code()
                    )));
                }
                let mut rng =
                    record_rng(config.global_seed, &format!("m2ms:{}:{}", doc.id, tgt.code()));
                match build_pseudo_m2ms(doc, tgt, provider.as_ref(), &config.pseudo, &mut rng) {
                    Ok(PseudoOutcome::Kept(example)) => Ok(M2msRow::Kept(example)),
                    Ok(PseudoOutcome::Discarded(_)) => Ok(M2msRow::Discarded),
                    Err(err) => Err(err),
                }
            })
        })
        .collect();
    let mut outcome = Outcome::default();
    outcome.inputs.push(digest_input(input)?);
    let mut examples = Vec::new();
    let (mut discarded, mut skipped) = (0usize, 0usize);
    for row in rows {
        match row.map_err(Failure::from_core)? {
            M2msRow::Kept(example) => examples.push(*example),
            M2msRow::Discarded => discarded += 1,
            M2msRow::Skipped(warning) => {
                skipped += 1;
                outcome.warnings.push(warning);
            }
        }
    }
    write_output(out, &to_jsonl(&examples))?;
    outcome.count("input", docs.len());
    outcome.count("attempts", docs.len() * targets.len());
    outcome.count("kept", examples.len());
    outcome.count("discarded", discarded);
    outcome.count("skipped", skipped);
    outcome.finish_warnings();
    Ok(outcome)
}

/// `split`: assign parallel clusters to global splits and materialize
/// every direction, with an exhaustive leakage scan in the manifest.
pub fn split(config: &RunConfig) -> Result<Outcome, Failure> {
    let input = config.input_path()?;
    let out = config.output_path()?;
    let clusters: Vec<ParallelCluster> = read_jsonl(input)?;
    let targets = SplitTargets::Proportions {
        train: config.split.train,
        validation: config.split.validation,
        test: config.split.test,
    };
    let (dataset, report) = split_m2ms(
        &clusters,
        &targets,
        &config.split.zero_shot,
        config.global_seed,
    )
    .map_err(Failure::from_core)?;
    write_output(out, &to_jsonl(&flatten_dataset(&dataset)))?;
    let (train, validation, test) = split_totals(&dataset);
    let mut outcome = Outcome::default();
    outcome.inputs.push(digest_input(input)?);
    outcome.count("input", clusters.len());
    outcome.count("directions", dataset.directions.len());
    outcome.count("train", train);
    outcome.count("validation", validation);
    outcome.count("test", test);
    outcome.violations = Some(report.leakage_violations as u64);
    for shortfall in &report.shortfalls {
        outcome.warnings.push(format!(
            "{} {}: requested {} but materialized {}",
            shortfall.direction, shortfall.split, shortfall.requested, shortfall.materialized
        ));
    }
    outcome.finish_warnings();
    Ok(outcome)
}

/// `crosssum-split`: re-balance an existing per-direction corpus.
pub fn crosssum_split_cmd(config: &RunConfig) -> Result<Outcome, Failure> {
    let input = config.input_path()?;
    let out = config.output_path()?;
    let records: Vec<SplitFileRecord> = read_jsonl(input)?;
    let total = records.len();
    let mut provided: BTreeMap<Direction, DirectionSplit> = BTreeMap::new();
    for record in records {
        let lists = provided.entry(record.direction).or_default();
        let example = SplitExample {
            cluster_id: record.cluster_id,
            document: record.document,
            summary: record.summary,
        };
        match record.split {
            SplitKind::Train => lists.train.push(example),
            SplitKind::Validation => lists.validation.push(example),
            SplitKind::Test => lists.test.push(example),
        }
    }
    let dataset = crosssum_split(&provided, config.global_seed).map_err(Failure::from_core)?;
    write_output(out, &to_jsonl(&flatten_dataset(&dataset)))?;
    let (train, validation, test) = split_totals(&dataset);
    let mut outcome = Outcome::default();
    outcome.inputs.push(digest_input(input)?);
    outcome.count("input", total);
    outcome.count("directions", dataset.directions.len());
    outcome.count("train", train);
    outcome.count("validation", validation);
    outcome.count("test", test);
    Ok(outcome)
}

/// Input record for `sample-plan`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanInput {
    direction: Direction,
    count: u64,
}

/// Output record for `sample-plan`.
#[derive(Debug, Serialize)]
struct PlanRow {
    direction: Direction,
    count: u64,
    probability: f64,
}

/// `sample-plan`: temperature-weighted sampling probabilities per
/// direction, rounded to four decimals on the wire.
pub fn sample_plan(config: &RunConfig) -> Result<Outcome, Failure> {
    let input = config.input_path()?;
    let out = config.output_path()?;
    let records: Vec<PlanInput> = read_jsonl(input)?;
    let mut counts: BTreeMap<Direction, u64> = BTreeMap::new();
    for record in &records {
        if counts.insert(record.direction, record.count).is_some() {
            return Err(Failure::input(anyhow::anyhow!(
                "duplicate direction {} in sampling counts",
                record.direction
            )));
        }
    }
    let weights = direction_weights(&SamplerConfig {
        alpha: config.sampler.alpha,
        direction_counts: counts.clone(),
    })
    .map_err(Failure::from_core)?;
    let rows: Vec<PlanRow> = weights
        .iter()
        .map(|(&direction, &weight)| PlanRow {
            direction,
            count: counts[&direction],
            probability: (weight * 10_000.0).round() / 10_000.0,
        })
        .collect();
    write_output(out, &to_jsonl(&rows))?;
    let mut outcome = Outcome::default();
    outcome.inputs.push(digest_input(input)?);
    outcome.count("directions", rows.len());
    Ok(outcome)
}

/// `eval`: group predictions by direction, score each direction, and
/// write both a JSON report and a TSV grid.
pub fn eval(config: &RunConfig) -> Result<Outcome, Failure> {
    let input = config.input_path()?;
    let out = config.output_path()?;
    let predictions: Vec<PredictionRecord> = read_jsonl(input)?;
    if predictions.is_empty() {
        return Err(Failure::input(anyhow::anyhow!("no predictions to score")));
    }
    let total = predictions.len();
    let mut groups: BTreeMap<Direction, Vec<(String, String)>> = BTreeMap::new();
    for prediction in predictions {
        groups
            .entry(prediction.direction)
            .or_default()
            .push((prediction.candidate, prediction.reference));
    }
    let entries: Vec<(Direction, Vec<(String, String)>)> = groups.into_iter().collect();
    let rows: Vec<Result<DirectionReport, m2ms_core::Error>> = entries
        .par_iter()
        .map(|(direction, pairs)| evaluate_direction(*direction, pairs))
        .collect();
    let mut reports = Vec::with_capacity(rows.len());
    for row in rows {
        reports.push(row.map_err(Failure::from_core)?);
    }
    let mut report_json =
        serde_json::to_string_pretty(&reports).expect("reports serialize");
    report_json.push('\n');
    write_output(out, &report_json)?;
    write_output(&out.with_extension("tsv"), &render_tsv_grid(&reports))?;
    let mut outcome = Outcome::default();
    outcome.inputs.push(digest_input(input)?);
    outcome.count("input", total);
    outcome.count("directions", reports.len());
    Ok(outcome)
}

/// Input record for `langid`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TextRecord {
    id: String,
    text: String,
}

/// Output record for `langid`.
#[derive(Debug, Serialize)]
struct LangRow {
    id: String,
    lang: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// `langid`: detected language code (or null plus an error) per text.
pub fn langid(config: &RunConfig) -> Result<Outcome, Failure> {
    let input = config.input_path()?;
    let out = config.output_path()?;
    let records: Vec<TextRecord> = read_jsonl(input)?;
    let rows: Vec<LangRow> = records
        .par_iter()
        .map(|record| match detect_language(&record.text) {
            Ok(lang) => LangRow {
                id: record.id.clone(),
                lang: Some(lang.code()),
                error: None,
            },
            Err(err) => LangRow {
                id: record.id.clone(),
                lang: None,
                error: Some(err.to_string()),
            },
        })
        .collect();
    write_output(out, &to_jsonl(&rows))?;
    let classified = rows.iter().filter(|r| r.lang.is_some()).count();
    let mut outcome = Outcome::default();
    outcome.inputs.push(digest_input(input)?);
    outcome.count("input", records.len());
    outcome.count("classified", classified);
    outcome.count("failed", records.len() - classified);
    Ok(outcome)
}

/// `drift`: read `<code>.txt` embedding files for the configured
/// languages from the input directory, project jointly, and report the
/// focal language's centroid distance.
pub fn drift(config: &RunConfig) -> Result<Outcome, Failure> {
    let dir = config.input_path()?;
    let out = config.output_path()?;
    let focal = config.drift.focal;
    let mut outcome = Outcome::default();
    let mut texts = BTreeMap::new();
    for &lang in &config.languages {
        let path = dir.join(format!("{}.txt", lang.code()));
        if path.is_file() {
            let text = fs::read_to_string(&path).map_err(|e| {
                Failure::input(anyhow::anyhow!("cannot read {}: {e}", path.display()))
            })?;
            outcome.inputs.push(digest_input(&path)?);
            texts.insert(lang, text);
        }
    }
    if texts.len() < 2 {
        return Err(Failure::input(anyhow::anyhow!(
            "need embedding files for at least two configured languages in {}",
            dir.display()
        )));
    }
    if !texts.contains_key(&focal) {
        return Err(Failure::input(anyhow::anyhow!(
            "focal language {} has no embedding file in {}",
            focal.code(),
            dir.display()
        )));
    }
    let set = EmbeddingSet::from_language_texts(&texts).map_err(Failure::from_core)?;
    let words = set.len();
    let report = drift_analysis(&set, focal).map_err(Failure::from_core)?;
    if report.degenerate_rank {
        log::warn!("projection rank below two; second component zero-filled");
        outcome
            .warnings
            .push("projection rank below two; second component zero-filled".to_string());
    }
    let mut report_json = serde_json::to_string_pretty(&report).expect("report serializes");
    report_json.push('\n');
    write_output(out, &report_json)?;
    outcome.count("languages", texts.len());
    outcome.count("words", words);
    Ok(outcome)
}

/// `regen-profiles`: rebuild the language-ID profile files from the
/// bundled seed corpora into the output directory.
pub fn regen_profiles(config: &RunConfig) -> Result<Outcome, Failure> {
    let out_dir = config.output_path()?;
    fs::create_dir_all(out_dir).map_err(|e| {
        Failure::input(anyhow::anyhow!("cannot create {}: {e}", out_dir.display()))
    })?;
    let mut manifest_text = String::new();
    for &lang in profile_languages() {
        let seeds = seed_corpus(lang).expect("profile languages ship seed corpora");
        write_output(
            &out_dir.join(format!("{}.profile", lang.code())),
            &build_profile_text(seeds),
        )?;
        manifest_text.push_str(lang.code());
        manifest_text.push('\n');
    }
    write_output(&out_dir.join("manifest.txt"), &manifest_text)?;
    let mut outcome = Outcome::default();
    outcome.count("languages", profile_languages().len());
    Ok(outcome)
}
