//! Run manifests: everything needed to replay a run byte-for-byte.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name; replaying them from the same
    /// working directory reproduces every artifact.
    pub argv: Vec<String>,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub artifacts: Vec<Artifact>,
    pub version: String,
    pub wall_time_secs: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn hash_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(sha256_hex(&bytes))
}

impl RunManifest {
    pub fn new(
        command: &str,
        argv: Vec<String>,
        config: serde_json::Value,
        seeds: Vec<u64>,
        outputs: &[PathBuf],
        wall_time_secs: f64,
    ) -> Result<Self> {
        let artifacts = outputs
            .iter()
            .map(|p| {
                Ok(Artifact {
                    path: p.clone(),
                    sha256: hash_file(p)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(RunManifest {
            command: command.to_string(),
            argv,
            config,
            seeds,
            artifacts,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_secs,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
    }
}

/// Manifest location for a run whose primary output is `output`: inside it
/// if it is a directory, otherwise `<output>.manifest.json`.
pub fn manifest_path(output: &Path, is_dir: bool) -> PathBuf {
    if is_dir {
        output.join("manifest.json")
    } else {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }
}
