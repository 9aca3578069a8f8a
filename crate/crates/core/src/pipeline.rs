//! End-to-end runs: occurrences from records, merging, dataset recipes and
//! the spectrogram.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::corpus::{CitedReference, Record};
use crate::dedup::{
    apply_merges, auto_accept, drop_repeat_citations, propose_clusters, CRKey, DedupConfig, DedupError, Fingerprint,
    MergeProposal,
};
use crate::filters::{build_dataset, FilterError, FilterReport, PipelineConfig};
use crate::spectroscopy::{
    attribute_peaks, count_by_rpy, detect_peaks, median_deviation, Peak, SpectrumError, SpectrumPoint,
};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Dedup(#[from] DedupError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

/// Every CR occurrence of a corpus that carries an RPY, flattened in record
/// order. Proposal member ids index `crs`.
#[derive(Debug, Clone, Default)]
pub struct Occurrences {
    pub crs: Vec<CitedReference>,
    /// Record index of each entry in `crs`.
    pub record_of: Vec<usize>,
    pub n_records: u64,
    pub n_total: u64,
    pub n_imprecise: u64,
}

impl Occurrences {
    pub fn from_records(records: &[Record]) -> Self {
        let mut occ = Occurrences {
            n_records: records.len() as u64,
            ..Default::default()
        };
        for (ri, r) in records.iter().enumerate() {
            for cr in &r.cited_refs {
                occ.n_total += 1;
                if cr.rpy.is_some() {
                    occ.crs.push(cr.clone());
                    occ.record_of.push(ri);
                } else {
                    occ.n_imprecise += 1;
                }
            }
        }
        occ
    }

    pub fn fingerprint(&self) -> Fingerprint {
        Fingerprint {
            n_records: self.n_records,
            n_cr_occurrences: self.n_total,
            n_precise: self.crs.len() as u64,
        }
    }

    /// Proposals over these occurrences, all still `proposed`.
    pub fn propose(&self, cfg: &DedupConfig) -> Result<Vec<MergeProposal>, DedupError> {
        propose_clusters(&self.crs, cfg)
    }

    /// Proposals with every cluster accepted.
    pub fn auto_accepted(&self, cfg: &DedupConfig) -> Result<Vec<MergeProposal>, DedupError> {
        let mut proposals = self.propose(cfg)?;
        auto_accept(&mut proposals);
        Ok(proposals)
    }
}

/// Keys after merging, with the occurrence bookkeeping of each step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Merged {
    pub keys: Vec<CRKey>,
    /// All CR occurrences in the corpus.
    pub n_occurrences: u64,
    pub n_imprecise: u64,
    /// Keys before any proposal is applied (distinct raw strings with an RPY).
    pub n_keys_unmerged: usize,
    /// Repeat citations of one merged key within one record.
    pub n_repeat_dropped: u64,
    /// Occurrences left after merging, imprecise ones included.
    pub n_after_merge: u64,
}

impl Merged {
    /// Occurrences carried by the keys.
    pub fn n_precise(&self) -> u64 {
        self.keys.iter().map(|k| k.occurrences).sum()
    }
}

/// Applies the proposals' verdicts and counts each merged key once per
/// citing record.
pub fn merge(occ: &Occurrences, proposals: &[MergeProposal]) -> Result<Merged, DedupError> {
    let n_keys_unmerged = apply_merges(&occ.crs, &[])?.len();
    let keys = apply_merges(&occ.crs, proposals)?;
    let (keys, n_repeat_dropped) = drop_repeat_citations(keys, &occ.record_of);
    let precise: u64 = keys.iter().map(|k| k.occurrences).sum();
    Ok(Merged {
        keys,
        n_occurrences: occ.n_total,
        n_imprecise: occ.n_imprecise,
        n_keys_unmerged,
        n_repeat_dropped,
        n_after_merge: precise + occ.n_imprecise,
    })
}

/// Spectrogram settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumConfig {
    pub window: usize,
    pub min_deviation: Rational64,
    /// Contributing keys listed per peak.
    pub keys_per_peak: Option<usize>,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            window: crate::spectroscopy::DEFAULT_WINDOW,
            min_deviation: Rational64::from_integer(0),
            keys_per_peak: Some(5),
        }
    }
}

/// One dataset recipe and its spectrogram.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Analysis {
    pub keys: Vec<CRKey>,
    pub report: FilterReport,
    pub points: Vec<SpectrumPoint>,
    pub peaks: Vec<Peak>,
}

pub fn analyze(keys: &[CRKey], cfg: &PipelineConfig, spec: &SpectrumConfig) -> Result<Analysis, PipelineError> {
    let (kept, report) = build_dataset(keys.to_vec(), cfg)?;
    let points = median_deviation(&count_by_rpy(&kept), spec.window)?;
    let mut peaks = detect_peaks(&points, spec.min_deviation);
    attribute_peaks(&mut peaks, &kept, spec.keys_per_peak);
    Ok(Analysis {
        keys: kept,
        report,
        points,
        peaks,
    })
}
