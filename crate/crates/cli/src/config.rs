//! The single-document run configuration. Every knob has a default, so an
//! absent or partial config file is valid; unknown keys are rejected to
//! catch typos. Command-line flags override the corresponding fields.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use m2ms_core::noising::NoiseConfig;
use m2ms_core::pseudogen::PseudoConfig;
use m2ms_core::textcore::Language;

use crate::failure::Failure;
use crate::jsonl::sha256_hex;

/// Which translation backend to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    /// Deterministic in-process provider (identity mapping).
    Mock,
    /// HTTP provider speaking the `/translate` wire format.
    Http,
}

/// Translation provider settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProviderSection {
    /// Backend selection.
    pub kind: ProviderKind,
    /// HTTP endpoint; the `M2MS_PROVIDER_URL` environment variable takes
    /// precedence when set.
    pub url: Option<String>,
}

impl Default for ProviderSection {
    fn default() -> Self {
        ProviderSection {
            kind: ProviderKind::Mock,
            url: None,
        }
    }
}

/// Direction-sampling settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSection {
    /// Temperature exponent over per-direction example counts.
    pub alpha: f64,
}

impl Default for SamplerSection {
    fn default() -> Self {
        SamplerSection { alpha: 0.5 }
    }
}

/// Default input/output paths; `--in`/`--out` override them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsSection {
    /// Input file (or directory, for embedding analysis).
    pub input: Option<PathBuf>,
    /// Output file (or directory, for profile regeneration).
    pub output: Option<PathBuf>,
}

/// Cluster-splitting settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    /// Languages excluded from every training split.
    pub zero_shot: Vec<Language>,
    /// Train fraction of the cluster pool.
    pub train: f64,
    /// Validation fraction.
    pub validation: f64,
    /// Test fraction.
    pub test: f64,
}

impl Default for SplitSection {
    fn default() -> Self {
        SplitSection {
            zero_shot: Vec::new(),
            train: 0.8,
            validation: 0.1,
            test: 0.1,
        }
    }
}

/// Embedding-drift settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriftSection {
    /// Language whose centroid is compared against the rest.
    pub focal: Language,
}

impl Default for DriftSection {
    fn default() -> Self {
        DriftSection {
            focal: Language::Tr,
        }
    }
}

/// The resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Seed all per-record generators derive from.
    pub global_seed: u64,
    /// Languages the pipeline materializes (targets for pseudo-sample
    /// generation, files for drift analysis).
    pub languages: Vec<Language>,
    /// Corruption knobs for the denoising commands.
    pub noise: NoiseConfig,
    /// Pseudo-sample construction knobs.
    pub pseudo: PseudoConfig,
    /// Direction-sampling knobs.
    pub sampler: SamplerSection,
    /// Translation backend.
    pub provider: ProviderSection,
    /// Default input/output paths.
    pub paths: PathsSection,
    /// Cluster-splitting fractions and zero-shot languages.
    pub split: SplitSection,
    /// Drift-analysis settings.
    pub drift: DriftSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            global_seed: 0,
            languages: Language::ALL.to_vec(),
            noise: NoiseConfig::default(),
            pseudo: PseudoConfig::default(),
            sampler: SamplerSection::default(),
            provider: ProviderSection::default(),
            paths: PathsSection::default(),
            split: SplitSection::default(),
            drift: DriftSection::default(),
        }
    }
}

impl RunConfig {
    /// Parse a configuration document.
    pub fn from_json(text: &str) -> Result<RunConfig, Failure> {
        serde_json::from_str(text)
            .map_err(|e| Failure::input(anyhow::anyhow!("invalid config: {e}")))
    }

    /// Hash of the canonical serialization; recorded in run manifests.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serialization is infallible");
        sha256_hex(&canonical)
    }

    /// The resolved input path, required by all data-reading commands.
    pub fn input_path(&self) -> Result<&PathBuf, Failure> {
        self.paths
            .input
            .as_ref()
            .ok_or_else(|| Failure::input(anyhow::anyhow!("no input path: pass --in or set paths.input")))
    }

    /// The resolved output path, required by every command.
    pub fn output_path(&self) -> Result<&PathBuf, Failure> {
        self.paths
            .output
            .as_ref()
            .ok_or_else(|| Failure::input(anyhow::anyhow!("no output path: pass --out or set paths.output")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_yields_defaults() {
        let config = RunConfig::from_json("{}").unwrap();
        assert_eq!(config, RunConfig::default());
        assert_eq!(config.global_seed, 0);
        assert_eq!(config.languages.len(), 6);
        assert_eq!(config.pseudo.lambda_threshold, 0.7);
        assert_eq!(config.sampler.alpha, 0.5);
        assert_eq!(config.provider.kind, ProviderKind::Mock);
        assert_eq!(config.split.train, 0.8);
        assert_eq!(config.drift.focal, Language::Tr);
    }

    #[test]
    fn partial_sections_merge_with_defaults() {
        let config = RunConfig::from_json(
            r#"{"global_seed": 9, "split": {"zero_shot": ["tr"]}, "provider": {"kind": "http"}}"#,
        )
        .unwrap();
        assert_eq!(config.global_seed, 9);
        assert_eq!(config.split.zero_shot, vec![Language::Tr]);
        assert_eq!(config.split.train, 0.8, "unset fields keep defaults");
        assert_eq!(config.provider.kind, ProviderKind::Http);
        assert_eq!(config.provider.url, None);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_json(r#"{"global_sede": 1}"#).is_err());
        assert!(RunConfig::from_json(r#"{"split": {"trian": 0.5}}"#).is_err());
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let a = RunConfig::default();
        let mut b = RunConfig::default();
        assert_eq!(a.digest(), b.digest());
        b.global_seed = 1;
        assert_ne!(a.digest(), b.digest());
    }

    #[test]
    fn missing_paths_are_input_errors() {
        let config = RunConfig::default();
        assert_eq!(config.input_path().unwrap_err().exit_code(), 1);
        assert_eq!(config.output_path().unwrap_err().exit_code(), 1);
    }
}
