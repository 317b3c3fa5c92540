//! Dataset and image manifests: JSON indexes that tie artifact files to
//! their label, split, SNR, and generating seed. Paths are stored relative
//! to the manifest's directory with forward slashes on every platform.

use std::path::Path;

use hybridsig_modem::{ModemConfig, ModulationScheme};
use hybridsig_raster::Representation;
use serde::{Deserialize, Serialize};

use crate::config::snr_serde;
use crate::{PipelineError, Result};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub path: String,
    pub label: ModulationScheme,
    pub split: Split,
    #[serde(with = "snr_serde")]
    pub snr_db: f64,
    /// Seed of the signal realization this segment was cut from.
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub version: u32,
    pub modem: ModemConfig,
    pub entries: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageEntry {
    /// One file for single-plane representations, the I and Q planes for the
    /// time representation.
    pub paths: Vec<String>,
    pub label: ModulationScheme,
    pub split: Split,
    #[serde(with = "snr_serde")]
    pub snr_db: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageManifest {
    pub version: u32,
    pub representation: Representation,
    pub canvas: usize,
    pub entries: Vec<ImageEntry>,
}

impl DatasetManifest {
    pub fn count(&self, label: ModulationScheme, split: Split) -> usize {
        self.entries
            .iter()
            .filter(|e| e.label == label && e.split == split)
            .count()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        save_json(path, self)
    }
}

impl ImageManifest {
    pub fn split_entries(&self, split: Split) -> impl Iterator<Item = &ImageEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        save_json(path, self)
    }
}

fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| PipelineError::Format(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| PipelineError::io(path, e))
}

fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| PipelineError::Format(format!("{}: {e}", path.display())))
}

pub fn load_dataset_manifest(path: &Path) -> Result<DatasetManifest> {
    let manifest: DatasetManifest = load_json(path)?;
    if manifest.version != MANIFEST_VERSION {
        return Err(PipelineError::Format(format!(
            "manifest version {} unsupported, expected {MANIFEST_VERSION}",
            manifest.version
        )));
    }
    Ok(manifest)
}

pub fn load_image_manifest(path: &Path) -> Result<ImageManifest> {
    let manifest: ImageManifest = load_json(path)?;
    if manifest.version != MANIFEST_VERSION {
        return Err(PipelineError::Format(format!(
            "manifest version {} unsupported, expected {MANIFEST_VERSION}",
            manifest.version
        )));
    }
    Ok(manifest)
}
