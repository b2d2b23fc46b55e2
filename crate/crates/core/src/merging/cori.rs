use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{common_query_id, Candidates, MergeError, MergedRun};
use crate::engine::RankedList;
use crate::selection::SourceScore;

/// `(D' + 0.4 * D' * C') / 1.4` for normalized document score `D'` and
/// normalized source score `C'`.
pub fn cori_merge_score(doc_norm: f64, source_norm: f64) -> f64 {
    (doc_norm + 0.4 * doc_norm * source_norm) / 1.4
}

/// Min-max normalization; a set without spread maps to 1.0.
fn min_max(values: impl Iterator<Item = f64> + Clone) -> impl Fn(f64) -> f64 {
    let lo = values.clone().fold(f64::INFINITY, f64::min);
    let hi = values.fold(f64::NEG_INFINITY, f64::max);
    move |v| if hi > lo { (v - lo) / (hi - lo) } else { 1.0 }
}

/// CORI score of every (source, document) pair, before deduplication.
pub(crate) fn cori_scores<'a>(
    lists: &'a [RankedList],
    source_scores: &[SourceScore],
) -> Result<BTreeMap<(&'a str, &'a str), f64>, MergeError> {
    let by_source: BTreeMap<&str, f64> = source_scores.iter().map(|s| (s.source_id.as_str(), s.score)).collect();
    let c_norm = min_max(source_scores.iter().map(|s| s.score));
    let mut out = BTreeMap::new();
    for list in lists {
        let c = *by_source
            .get(list.source_id.as_str())
            .ok_or_else(|| MergeError::UnknownSource(list.source_id.clone()))?;
        let c = c_norm(c);
        let d_norm = min_max(list.entries.iter().map(|e| e.score));
        for e in &list.entries {
            out.insert((list.source_id.as_str(), e.doc_id.as_str()), cori_merge_score(d_norm(e.score), c));
        }
    }
    Ok(out)
}

/// Heuristic CORI merge; duplicates keep their highest merged score.
pub fn cori_merge(lists: &[RankedList], source_scores: &[SourceScore]) -> Result<MergedRun, MergeError> {
    let query_id = common_query_id(lists)?;
    let scores = cori_scores(lists, source_scores)?;
    let mut candidates = Candidates::default();
    for list in lists {
        for e in &list.entries {
            let s = scores[&(list.source_id.as_str(), e.doc_id.as_str())];
            candidates.offer(&e.doc_id, s, &list.source_id, e.score);
        }
    }
    Ok(candidates.into_run(&query_id, Vec::new(), false))
}
