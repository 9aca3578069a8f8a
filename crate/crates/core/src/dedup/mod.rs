//! Clustering of cited-reference variants and merging them into keys.
//!
//! Candidate pairs must share an RPY. Equal volume and page lower the string
//! similarity bar to a floor; contradictory volume or page blocks the pair.

mod cluster;
mod sidecar;
mod similarity;

use serde::{Deserialize, Serialize};

use crate::corpus::CitedReference;
use crate::fraction::Fraction;

pub use cluster::{apply_merges, distinct_raws, drop_repeat_citations, propose_clusters, set_status};
pub use sidecar::{load_sidecar, save_sidecar, sidecar_path, Fingerprint, Sidecar, SIDECAR_VERSION};
pub use similarity::{similarity, similarity_text};

#[derive(Debug, thiserror::Error)]
pub enum DedupError {
    #[error("occurrence {0} has no reference publication year")]
    ImpreciseInput(usize),
    #[error("proposal {cluster_id} references unknown occurrence {occurrence}")]
    DanglingProposal { cluster_id: String, occurrence: usize },
    #[error("no proposal {0}")]
    UnknownProposal(String),
    #[error("invalid dedup config: {0}")]
    InvalidConfig(String),
    #[error("sidecar does not belong to this corpus: {0}")]
    SidecarMismatch(String),
    #[error("sidecar: {0}")]
    SidecarFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumePageRule {
    /// Never pair two references whose volumes, or whose pages, are both
    /// present and differ.
    #[default]
    RequireEqualWhenBothPresent,
    Ignore,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DedupConfig {
    pub similarity_threshold: Fraction,
    pub volume_page_rule: VolumePageRule,
    pub similarity_floor_with_vp_match: Fraction,
}

impl Default for DedupConfig {
    fn default() -> Self {
        DedupConfig {
            similarity_threshold: Fraction::new(3, 4),
            volume_page_rule: VolumePageRule::RequireEqualWhenBothPresent,
            similarity_floor_with_vp_match: Fraction::new(1, 2),
        }
    }
}

impl DedupConfig {
    pub fn validate(&self) -> Result<(), DedupError> {
        if !self.similarity_threshold.is_unit_interval() || !self.similarity_floor_with_vp_match.is_unit_interval() {
            return Err(DedupError::InvalidConfig("thresholds must lie in [0, 1]".into()));
        }
        if self.similarity_floor_with_vp_match > self.similarity_threshold {
            return Err(DedupError::InvalidConfig(format!(
                "floor {} exceeds threshold {}",
                self.similarity_floor_with_vp_match, self.similarity_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    VolumePageMatch,
    StringSimilarity,
    Both,
}

impl Evidence {
    fn combine(self, other: Evidence) -> Evidence {
        if self == other {
            self
        } else {
            Evidence::Both
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProposalStatus {
    Proposed,
    Accepted,
    Rejected,
}

impl std::str::FromStr for ProposalStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "proposed" => Ok(ProposalStatus::Proposed),
            "accepted" => Ok(ProposalStatus::Accepted),
            "rejected" => Ok(ProposalStatus::Rejected),
            other => Err(format!("unknown status {other:?}")),
        }
    }
}

/// A set of variants judged to denote one referenced work.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeProposal {
    pub cluster_id: String,
    pub rpy: i32,
    /// Indices into the occurrence list the proposal was built from.
    pub member_occurrence_ids: Vec<usize>,
    /// Distinct verbatim strings in the cluster, sorted.
    pub variant_raws: Vec<String>,
    /// Weakest accepted pairwise similarity inside the cluster.
    pub similarity_score: Fraction,
    pub evidence: Evidence,
    pub status: ProposalStatus,
}

/// A merged reference with its occurrence count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CRKey {
    pub cluster_id: String,
    pub representative: CitedReference,
    pub occurrences: u64,
    pub variant_raws: Vec<String>,
    /// Occurrence ids merged into this key.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub members: Vec<usize>,
}

impl CRKey {
    /// The key's RPY. Keys are only built from references that have one.
    pub fn rpy(&self) -> i32 {
        self.representative.rpy.unwrap_or_default()
    }
}

/// Splits references into those with an RPY and those without, keeping order.
pub fn drop_imprecise<T: AsRef<CitedReference>>(crs: Vec<T>) -> (Vec<T>, Vec<T>) {
    crs.into_iter().partition(|c| c.as_ref().rpy.is_some())
}

/// Marks every proposed cluster accepted, leaving explicit verdicts alone.
pub fn auto_accept(proposals: &mut [MergeProposal]) {
    for p in proposals.iter_mut().filter(|p| p.status == ProposalStatus::Proposed) {
        p.status = ProposalStatus::Accepted;
    }
}
