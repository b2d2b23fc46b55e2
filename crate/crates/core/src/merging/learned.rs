use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::cori::cori_scores;
use super::{
    common_query_id, compute_overlap, Candidates, LearnedModel, MergeError, MergeParams, MergedRun, OverlapScoring,
    TrainingSet,
};
use crate::engine::RankedList;
use crate::mlmodels::{fit_model, ModelKind, ModelParams};
use crate::seed::derive_seed;
use crate::selection::SourceScore;

/// Label mixed into the seed of per-query global models.
const GM_SEED_LABEL: &str = "GM";

fn check_sources(lists: &[RankedList], source_scores: &[SourceScore]) -> Result<(), MergeError> {
    let known: BTreeSet<&str> = source_scores.iter().map(|s| s.source_id.as_str()).collect();
    match lists.iter().find(|l| !known.contains(l.source_id.as_str())) {
        Some(l) => Err(MergeError::UnknownSource(l.source_id.clone())),
        None => Ok(()),
    }
}

/// Per-source least-squares mapping from local to centralized scores.
///
/// Identical to [`mm_merge`] with [`ModelKind::Linear`].
pub fn ssl_merge(
    lists: &[RankedList],
    central_list: &RankedList,
    source_scores: &[SourceScore],
    merge: &MergeParams,
    models: &ModelParams,
) -> Result<MergedRun, MergeError> {
    let model = LearnedModel { kind: ModelKind::Linear, params: models, seed: 0 };
    mm_merge(lists, central_list, source_scores, merge, model)
}

/// One model per source, trained on that source's overlap pairs
/// (local score → centralized score) and applied to its documents.
pub fn mm_merge(
    lists: &[RankedList],
    central_list: &RankedList,
    source_scores: &[SourceScore],
    merge: &MergeParams,
    model: LearnedModel<'_>,
) -> Result<MergedRun, MergeError> {
    let query_id = common_query_id(lists)?;
    check_sources(lists, source_scores)?;
    let fallback = cori_scores(lists, source_scores)?;
    let needed = merge.min_overlap.max(model.kind.min_points());

    let mut candidates = Candidates::default();
    let mut fallback_sources = Vec::new();
    for list in lists.iter().filter(|l| !l.is_empty()) {
        let overlap = compute_overlap(list, central_list);
        let fitted = if overlap.len() >= needed {
            let ts = TrainingSet {
                features: overlap.iter().map(|p| vec![p.local_score]).collect(),
                targets: overlap.iter().map(|p| p.central_score).collect(),
                layout: Vec::new(),
            };
            let seed = derive_seed(model.seed, &[&query_id, &list.source_id]);
            fit_model(model.kind, model.params, &ts, seed).ok()
        } else {
            None
        };
        let Some((fitted, _)) = fitted else {
            fallback_sources.push(list.source_id.clone());
            for e in &list.entries {
                let s = fallback[&(list.source_id.as_str(), e.doc_id.as_str())];
                candidates.offer(&e.doc_id, s, &list.source_id, e.score);
            }
            continue;
        };
        let central: BTreeMap<&str, f64> = overlap.iter().map(|p| (p.doc_id.as_str(), p.central_score)).collect();
        for e in &list.entries {
            let score = match (merge.overlap_scoring, central.get(e.doc_id.as_str())) {
                (OverlapScoring::Central, Some(&c)) => c,
                _ => fitted.predict(&[e.score])?,
            };
            candidates.offer(&e.doc_id, score, &list.source_id, e.score);
        }
    }
    Ok(candidates.into_run(&query_id, fallback_sources, false))
}

/// Feature vector of every returned document: position `j` holds the score
/// `layout[j]` gave the document, or 0 if that source did not return it.
pub fn gm_features(lists: &[RankedList], layout: &[String]) -> BTreeMap<String, Vec<f64>> {
    let position: BTreeMap<&str, usize> = layout.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut out: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for list in lists {
        let Some(&j) = position.get(list.source_id.as_str()) else { continue };
        for e in &list.entries {
            out.entry(e.doc_id.clone()).or_insert_with(|| vec![0.0; layout.len()])[j] = e.score;
        }
    }
    out
}

/// Overlap documents as global-model training rows, in doc id order.
pub fn gm_training_set(
    features: &BTreeMap<String, Vec<f64>>,
    central_list: &RankedList,
    layout: &[String],
) -> (Vec<String>, TrainingSet) {
    let central: BTreeMap<&str, f64> = central_list.entries.iter().map(|e| (e.doc_id.as_str(), e.score)).collect();
    let mut ids = Vec::new();
    let mut ts = TrainingSet { layout: layout.to_vec(), ..Default::default() };
    for (doc, x) in features {
        if let Some(&c) = central.get(doc.as_str()) {
            ids.push(doc.clone());
            ts.features.push(x.clone());
            ts.targets.push(c);
        }
    }
    (ids, ts)
}

/// One model per query over cross-source score vectors; the layout is the
/// order of `source_scores`. Too few overlap documents (or a failed fit)
/// send the whole query to CORI merging.
pub fn gm_merge(
    lists: &[RankedList],
    central_list: &RankedList,
    source_scores: &[SourceScore],
    merge: &MergeParams,
    model: LearnedModel<'_>,
) -> Result<MergedRun, MergeError> {
    let query_id = common_query_id(lists)?;
    check_sources(lists, source_scores)?;
    let layout: Vec<String> = source_scores.iter().map(|s| s.source_id.clone()).collect();
    let features = gm_features(lists, &layout);
    let (overlap_ids, ts) = gm_training_set(&features, central_list, &layout);

    let fitted = if ts.len() >= merge.gm_min_overlap.max(model.kind.min_points()) {
        let seed = derive_seed(model.seed, &[&query_id, GM_SEED_LABEL]);
        fit_model(model.kind, model.params, &ts, seed).ok()
    } else {
        None
    };
    let Some((fitted, _)) = fitted else {
        let mut run = super::cori_merge(lists, source_scores)?;
        run.query_fallback = true;
        run.fallback_sources = lists.iter().map(|l| l.source_id.clone()).collect();
        return Ok(run);
    };

    let central: BTreeMap<&str, f64> =
        overlap_ids.iter().map(String::as_str).zip(ts.targets.iter().copied()).collect();
    let mut predicted: BTreeMap<&str, f64> = BTreeMap::new();
    for (doc, x) in &features {
        let score = match (merge.overlap_scoring, central.get(doc.as_str())) {
            (OverlapScoring::Central, Some(&c)) => c,
            _ => fitted.predict(x)?,
        };
        predicted.insert(doc, score);
    }
    let mut candidates = Candidates::default();
    for list in lists {
        for e in &list.entries {
            candidates.offer(&e.doc_id, predicted[e.doc_id.as_str()], &list.source_id, e.score);
        }
    }
    Ok(candidates.into_run(&query_id, Vec::new(), false))
}
