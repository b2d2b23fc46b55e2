//! Cutoff metrics: average precision, recall and PRES.
//!
//! PRES (patent retrieval evaluation score) places relevant documents that
//! were not found within `n_max` at the worst ranks after `n_max`, so it
//! rewards finding every relevant document early.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::engine::RankedList;

pub const DEFAULT_CUTOFF: usize = 100;

/// Relevant documents per query.
pub type Qrels = BTreeMap<String, BTreeSet<String>>;

/// `(1/|rel|) * sum over relevant ranks r <= k of hits(r) / r`.
pub fn average_precision(run: &RankedList, rel: &BTreeSet<String>, k: usize) -> f64 {
    if rel.is_empty() {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, e) in run.entries.iter().take(k).enumerate() {
        if rel.contains(&e.doc_id) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    sum / rel.len() as f64
}

/// `|top-k ∩ rel| / |rel|`.
pub fn recall_at(run: &RankedList, rel: &BTreeSet<String>, k: usize) -> f64 {
    if rel.is_empty() {
        return 0.0;
    }
    let found = run.entries.iter().take(k).filter(|e| rel.contains(&e.doc_id)).count();
    found as f64 / rel.len() as f64
}

/// `1 - (mean rank - (n + 1) / 2) / n_max`, with missed relevant documents
/// placed at ranks `n_max + 1, n_max + 2, ...`; clamped to `[0, 1]`.
pub fn pres_at(run: &RankedList, rel: &BTreeSet<String>, n_max: usize) -> f64 {
    if rel.is_empty() || n_max == 0 {
        return 0.0;
    }
    let n = rel.len();
    let mut rank_sum = 0.0;
    let mut found = 0usize;
    for (i, e) in run.entries.iter().take(n_max).enumerate() {
        if rel.contains(&e.doc_id) {
            found += 1;
            rank_sum += (i + 1) as f64;
        }
    }
    for j in 1..=(n - found) {
        rank_sum += (n_max + j) as f64;
    }
    let nf = n as f64;
    let pres = 1.0 - (rank_sum / nf - (nf + 1.0) / 2.0) / n_max as f64;
    pres.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct QueryScores {
    pub ap: f64,
    pub pres: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub k: usize,
    pub per_query: BTreeMap<String, QueryScores>,
    pub map: f64,
    pub pres: f64,
    pub recall: f64,
    pub n_queries: usize,
    /// Queries in scope whose judgment set was empty.
    pub skipped: usize,
}

/// Evaluates every query that has judgments. A judged query without a run
/// scores zero. `queries`, when given, limits evaluation to those ids.
pub fn evaluate(
    runs: &BTreeMap<String, RankedList>,
    qrels: &Qrels,
    k: usize,
    queries: Option<&BTreeSet<String>>,
) -> EvalResult {
    let empty = RankedList::default();
    let mut result = EvalResult { k, ..Default::default() };
    let in_scope: BTreeSet<&String> = match queries {
        Some(q) => q.iter().collect(),
        None => qrels.keys().collect(),
    };
    for q in in_scope {
        let Some(rel) = qrels.get(q).filter(|r| !r.is_empty()) else {
            result.skipped += 1;
            continue;
        };
        let run = runs.get(q).unwrap_or(&empty);
        let scores = QueryScores {
            ap: average_precision(run, rel, k),
            pres: pres_at(run, rel, k),
            recall: recall_at(run, rel, k),
        };
        result.per_query.insert(q.clone(), scores);
    }
    let n = result.per_query.len();
    result.n_queries = n;
    if n > 0 {
        let nf = n as f64;
        result.map = result.per_query.values().map(|s| s.ap).sum::<f64>() / nf;
        result.pres = result.per_query.values().map(|s| s.pres).sum::<f64>() / nf;
        result.recall = result.per_query.values().map(|s| s.recall).sum::<f64>() / nf;
    }
    result
}
