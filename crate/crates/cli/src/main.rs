//! `m2ms` — corpus construction and evaluation toolkit for many-to-many
//! multilingual summarization.
//!
//! Exit codes: 0 success, 1 input/config error, 2 provider failure.

mod commands;
mod config;
mod failure;
mod jsonl;
mod manifest;

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::{ProviderKind, RunConfig};
use crate::failure::Failure;
use crate::manifest::{write_manifest, RunManifest};

#[derive(Debug, Parser)]
#[command(
    name = "m2ms",
    version,
    about = "Corpus construction and evaluation for many-to-many multilingual summarization"
)]
struct Cli {
    /// JSON configuration file; flags below override its fields.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Input file (or directory, for `drift`).
    #[arg(long = "in", global = true, value_name = "PATH")]
    input: Option<PathBuf>,

    /// Output file (or directory, for `regen-profiles`).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Global seed; every record derives its generator from this.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Worker threads (default: one per CPU). Outputs do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Translation backend; `http` reads M2MS_PROVIDER_URL or provider.url.
    #[arg(long, global = true, value_enum, value_name = "KIND")]
    provider: Option<ProviderKind>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Segment raw documents into sentence records.
    #[command(name = "segment")]
    Segment,
    /// Select gap sentences per document by relative informativeness.
    #[command(name = "gsg")]
    Gsg,
    /// Build monolingual denoising pairs (permutation + span infilling).
    #[command(name = "noise-meta")]
    NoiseMeta,
    /// Build cross-lingual denoising pairs from parallel sentences.
    #[command(name = "make-xldn")]
    MakeXldn,
    /// Build pseudo summarization pairs with round-trip filtering.
    #[command(name = "make-m2ms")]
    MakeM2ms,
    /// Assign parallel clusters to leakage-free train/validation/test splits.
    #[command(name = "split")]
    Split,
    /// Re-balance an existing per-direction corpus.
    #[command(name = "crosssum-split")]
    CrosssumSplit,
    /// Compute temperature-weighted direction sampling probabilities.
    #[command(name = "sample-plan")]
    SamplePlan,
    /// Score predictions per direction (overlap metrics + language rate).
    #[command(name = "eval")]
    Eval,
    /// Detect the language of each input text.
    #[command(name = "langid")]
    Langid,
    /// Measure a focal language's embedding-centroid distance after joint projection.
    #[command(name = "drift")]
    Drift,
    /// Rebuild the bundled language-ID profiles from the seed corpora.
    #[command(name = "regen-profiles")]
    RegenProfiles,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Segment => "segment",
            Command::Gsg => "gsg",
            Command::NoiseMeta => "noise-meta",
            Command::MakeXldn => "make-xldn",
            Command::MakeM2ms => "make-m2ms",
            Command::Split => "split",
            Command::CrosssumSplit => "crosssum-split",
            Command::SamplePlan => "sample-plan",
            Command::Eval => "eval",
            Command::Langid => "langid",
            Command::Drift => "drift",
            Command::RegenProfiles => "regen-profiles",
        }
    }
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{err}");
                    0
                }
                _ => {
                    eprint!("{err}");
                    1
                }
            };
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    match execute(cli) {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("error: {failure}");
            failure.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Failure::input(anyhow::anyhow!("cannot read config {}: {e}", path.display()))
            })?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.global_seed = seed;
    }
    if let Some(kind) = cli.provider {
        config.provider.kind = kind;
    }
    if let Some(input) = cli.input {
        config.paths.input = Some(input);
    }
    if let Some(out) = cli.out {
        config.paths.output = Some(out);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::input(anyhow::anyhow!("cannot build worker pool: {e}")))?;
    let mut outcome = pool.install(|| dispatch(&cli.command, &config))?;

    for warning in &outcome.warnings {
        log::warn!("{warning}");
    }
    let manifest = RunManifest {
        command: cli.command.name().to_string(),
        seed: config.global_seed,
        config_sha256: config.digest(),
        inputs: std::mem::take(&mut outcome.inputs),
        counts: std::mem::take(&mut outcome.counts),
        violations: outcome.violations,
        warnings: std::mem::take(&mut outcome.warnings),
    };
    write_manifest(config.output_path()?, &manifest)?;
    Ok(())
}

fn dispatch(command: &Command, config: &RunConfig) -> Result<commands::Outcome, Failure> {
    match command {
        Command::Segment => commands::segment(config),
        Command::Gsg => commands::gsg(config),
        Command::NoiseMeta => commands::noise_meta(config),
        Command::MakeXldn => commands::make_xldn(config),
        Command::MakeM2ms => commands::make_m2ms(config),
        Command::Split => commands::split(config),
        Command::CrosssumSplit => commands::crosssum_split_cmd(config),
        Command::SamplePlan => commands::sample_plan(config),
        Command::Eval => commands::eval(config),
        Command::Langid => commands::langid(config),
        Command::Drift => commands::drift(config),
        Command::RegenProfiles => commands::regen_profiles(config),
    }
}
