//! Results merging: turning per-collection result lists into one list of
//! globally comparable scores.
//!
//! Strategies:
//!
//! * [`cori_merge`]: heuristic weighting of min-max normalized document and
//!   source scores.
//! * [`ssl_merge`]: per-source least-squares line from local to centralized
//!   scores, fitted on overlap documents.
//! * [`mm_merge`]: the same per-source scheme with any [`ModelKind`].
//! * [`gm_merge`]: one model per query over the vector of every selected
//!   source's score for a document (zero where the source did not return it).
//!
//! Learned strategies fall back to CORI scoring when a source (or, for the
//! global model, the whole query) has too few overlap documents.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{rank_order, Entry, RankedList};
use crate::mlmodels::{ModelError, ModelKind};

mod cori;
mod learned;

pub use cori::{cori_merge, cori_merge_score};
pub use learned::{gm_features, gm_merge, gm_training_set, mm_merge, ssl_merge};
pub use crate::mlmodels::TrainingSet;

/// Source id carried by merged lists.
pub const MERGED_SOURCE: &str = "MERGED";
/// Source id of the centralized sample index.
pub const CENTRAL_SOURCE: &str = "CENTRAL";
/// Score of the first document when scores are assigned from ranks.
pub const ARTIFICIAL_TOP: f64 = 0.6;
/// Score of the last document when scores are assigned from ranks.
pub const ARTIFICIAL_BOTTOM: f64 = 0.4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MergeError {
    #[error("cannot assign scores to an empty list")]
    EmptyList,
    #[error("source score {0} is outside [0, 1]")]
    BadSourceScore(f64),
    #[error("no selection score for source {0}")]
    UnknownSource(String),
    #[error("lists belong to different queries ({0} and {1})")]
    QueryMismatch(String, String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A document returned by both a source and the centralized sample index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapPair {
    pub doc_id: String,
    pub local_score: f64,
    pub central_score: f64,
    pub source_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub source_id: String,
    pub local_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedEntry {
    pub doc_id: String,
    pub score: f64,
    pub rank: usize,
    /// Every source that returned the document, with its pre-merge score.
    pub provenance: Vec<Contribution>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MergedRun {
    pub query_id: String,
    pub entries: Vec<MergedEntry>,
    /// Sources whose documents were scored by the CORI fallback.
    pub fallback_sources: Vec<String>,
    /// Set when the whole query fell back to CORI.
    pub query_fallback: bool,
}

impl MergedRun {
    pub fn to_ranked_list(&self) -> RankedList {
        RankedList {
            query_id: self.query_id.clone(),
            source_id: MERGED_SOURCE.into(),
            entries: self
                .entries
                .iter()
                .map(|e| Entry { doc_id: e.doc_id.clone(), score: e.score, rank: e.rank })
                .collect(),
        }
    }
}

/// How overlap documents are scored in learned merges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverlapScoring {
    /// Overlap documents go through the fitted model like every other
    /// document.
    #[default]
    Predict,
    /// Overlap documents keep their centralized score.
    Central,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergeParams {
    /// Minimum overlap pairs for a per-source fit.
    pub min_overlap: usize,
    /// Minimum overlap documents for a per-query global fit.
    pub gm_min_overlap: usize,
    pub overlap_scoring: OverlapScoring,
}

impl Default for MergeParams {
    fn default() -> Self {
        Self { min_overlap: 3, gm_min_overlap: 5, overlap_scoring: OverlapScoring::Predict }
    }
}

/// The learned model used by [`mm_merge`] and [`gm_merge`].
#[derive(Debug, Clone, Copy)]
pub struct LearnedModel<'a> {
    pub kind: ModelKind,
    pub params: &'a crate::mlmodels::ModelParams,
    /// Master seed; each fit derives its own seed from it.
    pub seed: u64,
}

/// Replaces scores with evenly spaced values from 0.6 (first) to 0.4
/// (last), multiplied by the source's selection score. A single document
/// gets 0.6. Order and ranks are kept.
pub fn assign_artificial_scores(list: &RankedList, source_score: f64) -> Result<RankedList, MergeError> {
    if list.is_empty() {
        return Err(MergeError::EmptyList);
    }
    if !(0.0..=1.0).contains(&source_score) {
        return Err(MergeError::BadSourceScore(source_score));
    }
    let m = list.len();
    let span = ARTIFICIAL_TOP - ARTIFICIAL_BOTTOM;
    let mut out = list.clone();
    for (i, e) in out.entries.iter_mut().enumerate() {
        let base = if m == 1 { ARTIFICIAL_TOP } else { ARTIFICIAL_TOP - span * i as f64 / (m - 1) as f64 };
        e.score = base * source_score;
    }
    Ok(out)
}

/// Documents present in both lists, in source rank order.
pub fn compute_overlap(source_list: &RankedList, central_list: &RankedList) -> Vec<OverlapPair> {
    let central: BTreeMap<&str, f64> = central_list.entries.iter().map(|e| (e.doc_id.as_str(), e.score)).collect();
    source_list
        .entries
        .iter()
        .filter_map(|e| {
            central.get(e.doc_id.as_str()).map(|&c| OverlapPair {
                doc_id: e.doc_id.clone(),
                local_score: e.score,
                central_score: c,
                source_id: source_list.source_id.clone(),
            })
        })
        .collect()
}

/// Truncates to `cutoff` entries and renumbers ranks from 1.
pub fn finalize(mut run: MergedRun, cutoff: usize) -> MergedRun {
    run.entries.truncate(cutoff);
    for (i, e) in run.entries.iter_mut().enumerate() {
        e.rank = i + 1;
    }
    run
}

/// Accumulates scored candidates, keeping the maximum score per document
/// and every contributing source.
#[derive(Default)]
pub(crate) struct Candidates {
    docs: BTreeMap<String, (f64, Vec<Contribution>)>,
}

impl Candidates {
    pub(crate) fn offer(&mut self, doc_id: &str, score: f64, source_id: &str, local_score: f64) {
        let slot = self.docs.entry(doc_id.into()).or_insert((f64::NEG_INFINITY, Vec::new()));
        if score > slot.0 {
            slot.0 = score;
        }
        slot.1.push(Contribution { source_id: source_id.into(), local_score });
    }

    pub(crate) fn into_run(self, query_id: &str, fallback_sources: Vec<String>, query_fallback: bool) -> MergedRun {
        let mut entries: Vec<MergedEntry> = self
            .docs
            .into_iter()
            .map(|(doc_id, (score, mut provenance))| {
                provenance.sort_by(|a, b| a.source_id.cmp(&b.source_id));
                MergedEntry { doc_id, score, rank: 0, provenance }
            })
            .collect();
        entries.sort_by(|a, b| rank_order((&a.doc_id, a.score), (&b.doc_id, b.score)));
        for (i, e) in entries.iter_mut().enumerate() {
            e.rank = i + 1;
        }
        MergedRun { query_id: query_id.into(), entries, fallback_sources, query_fallback }
    }
}

/// The query id shared by all lists, or an error if they disagree.
pub(crate) fn common_query_id<'a>(lists: impl IntoIterator<Item = &'a RankedList>) -> Result<String, MergeError> {
    let mut id: Option<&str> = None;
    for l in lists {
        match id {
            None => id = Some(&l.query_id),
            Some(q) if q != l.query_id => return Err(MergeError::QueryMismatch(q.into(), l.query_id.clone())),
            _ => {}
        }
    }
    Ok(id.unwrap_or_default().into())
}
