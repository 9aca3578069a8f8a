//! Curation state saved next to a corpus file as `<corpus>.clusters.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{DedupConfig, DedupError, MergeProposal};

pub const SIDECAR_VERSION: u32 = 1;

/// Counts that tie a sidecar to the corpus its occurrence ids index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub n_records: u64,
    pub n_cr_occurrences: u64,
    pub n_precise: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    pub version: u32,
    pub config: DedupConfig,
    pub fingerprint: Fingerprint,
    pub proposals: Vec<MergeProposal>,
}

pub fn sidecar_path(corpus: &Path) -> PathBuf {
    let mut name = corpus.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".clusters.json");
    corpus.with_file_name(name)
}

pub fn save_sidecar(sidecar: &Sidecar, path: &Path) -> Result<(), DedupError> {
    let mut text = serde_json::to_string_pretty(sidecar).map_err(|e| DedupError::SidecarFormat(e.to_string()))?;
    text.push('\n');
    let mut tmp = path.as_os_str().to_os_string();
    tmp.push(".tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Loads a sidecar and checks that it was made for a corpus with `expected`
/// counts.
pub fn load_sidecar(path: &Path, expected: Fingerprint) -> Result<Sidecar, DedupError> {
    let text = fs::read_to_string(path)?;
    let sidecar: Sidecar = serde_json::from_str(&text).map_err(|e| DedupError::SidecarFormat(e.to_string()))?;
    if sidecar.version != SIDECAR_VERSION {
        return Err(DedupError::SidecarFormat(format!(
            "version {} is not supported (expected {SIDECAR_VERSION})",
            sidecar.version
        )));
    }
    if sidecar.fingerprint != expected {
        return Err(DedupError::SidecarMismatch(format!(
            "made for {:?}, corpus has {:?}",
            sidecar.fingerprint, expected
        )));
    }
    Ok(sidecar)
}
