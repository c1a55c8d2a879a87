//! Run manifests: every command records its effective seed, a hash of the
//! resolved configuration, digests of the inputs it read, and per-stage
//! counts, so a run can be audited and reproduced. Worker count and wall
//! time are deliberately absent — manifests must be byte-identical for
//! identical (config, seed, inputs).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::failure::Failure;
use crate::jsonl::write_output;

/// Digest of one input file.
#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    /// Path as passed on the command line.
    pub path: String,
    /// SHA-256 of the file contents.
    pub sha256: String,
}

/// The manifest written next to every command's output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    /// Subcommand name.
    pub command: String,
    /// Effective global seed (after any `--seed` override).
    pub seed: u64,
    /// SHA-256 of the resolved configuration JSON.
    pub config_sha256: String,
    /// Digests of every input file read.
    pub inputs: Vec<InputDigest>,
    /// Per-stage record counts.
    pub counts: BTreeMap<String, u64>,
    /// Leakage-scan result; present only for splitting commands.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violations: Option<u64>,
    /// Non-fatal anomalies observed during the run.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Where the manifest for an output path lives: `<out>.manifest.json` for
/// files, `<out>/run.manifest.json` for directories.
pub fn manifest_path(out: &Path) -> PathBuf {
    if out.is_dir() {
        out.join("run.manifest.json")
    } else {
        PathBuf::from(format!("{}.manifest.json", out.display()))
    }
}

/// Serialize and write the manifest next to `out`.
pub fn write_manifest(out: &Path, manifest: &RunManifest) -> Result<PathBuf, Failure> {
    let path = manifest_path(out);
    let mut body =
        serde_json::to_string_pretty(manifest).expect("manifest serialization is infallible");
    body.push('\n');
    write_output(&path, &body)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_outputs_get_a_sibling_manifest() {
        assert_eq!(
            manifest_path(Path::new("out/pairs.jsonl")),
            PathBuf::from("out/pairs.jsonl.manifest.json")
        );
    }

    #[test]
    fn directory_outputs_get_an_inner_manifest() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(
            manifest_path(dir.path()),
            dir.path().join("run.manifest.json")
        );
    }

    #[test]
    fn empty_sections_are_omitted_from_the_wire() {
        let manifest = RunManifest {
            command: "segment".into(),
            seed: 7,
            config_sha256: "00".into(),
            inputs: Vec::new(),
            counts: BTreeMap::new(),
            violations: None,
            warnings: Vec::new(),
        };
        let json = serde_json::to_string(&manifest).unwrap();
        assert!(!json.contains("violations"));
        assert!(!json.contains("warnings"));
        let with_violations = RunManifest {
            violations: Some(0),
            ..manifest
        };
        let json = serde_json::to_string(&with_violations).unwrap();
        assert!(json.contains("\"violations\":0"));
    }
}
