//! Run manifests: one JSON file per stage with the config hash, seed,
//! timings, and checksums of the files the stage read and wrote.
//! In normalized mode timings are omitted so re-runs are byte-identical.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// Hex SHA-256 of a file.
pub fn file_sha256(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex_digest(&bytes))
}

pub fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Stage-scoped seed: every stage draws its randomness from the single
/// top-level seed through a named derivation, so stages can be re-run
/// independently without replaying the whole pipeline's random stream.
pub fn derive_seed(root_seed: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(root_seed.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is long enough"))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub stage: String,
    pub tool_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub workers: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
    /// Role-keyed SHA-256 of the stage's inputs.
    pub inputs: BTreeMap<String, String>,
    /// Output-dir-relative path -> SHA-256 of the stage's outputs.
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn write(&self, output_dir: &Path) -> Result<()> {
        let dir = output_dir.join("manifests");
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let path = dir.join(format!("{}.json", self.stage));
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::domain(format!("serialize manifest: {e}")))?;
        std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))
    }
}
