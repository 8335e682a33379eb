//! Reading and writing the JSON/CSV artifact formats.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use torus_tda::field::ScalarField;
use torus_tda::persistence::Diagram;

/// Reads and parses a JSON file, reporting the file and line/column on error.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("malformed input {}", path.display()))
}

pub fn read_field(path: &Path) -> Result<ScalarField> {
    read_json(path)
}

/// A diagrams file holds either one diagram or a list of them (as written by
/// `persist`).
pub fn read_diagrams(path: &Path) -> Result<Vec<Diagram>> {
    let value: serde_json::Value = read_json(path)?;
    let parsed = if value.is_array() {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|d: Diagram| vec![d])
    };
    parsed.with_context(|| format!("malformed diagrams in {}", path.display()))
}

/// Selects the diagram of the given degree.
pub fn diagram_of_degree(diagrams: &[Diagram], degree: usize, path: &Path) -> Result<Diagram> {
    diagrams
        .iter()
        .find(|d| d.degree == degree)
        .cloned()
        .with_context(|| format!("{} has no diagram of degree {degree}", path.display()))
}

/// Collects written artifacts so the manifest can hash them.
#[derive(Debug, Default)]
pub struct Outputs {
    pub paths: Vec<PathBuf>,
}

impl Outputs {
    pub fn write_text(&mut self, path: &Path, text: &str) -> Result<()> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)
                .with_context(|| format!("cannot create {}", parent.display()))?;
        }
        fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
        self.paths.push(path.to_path_buf());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, path: &Path, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_text(path, &text)
    }
}
