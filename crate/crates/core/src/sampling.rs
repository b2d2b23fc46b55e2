//! Query-based sampling of collections and the centralized sample index.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::CollectionSet;
use crate::engine::{Bm25, EngineError, Index};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplingError {
    #[error("target sample size must be at least 1")]
    ZeroTarget,
    #[error("documents per query must be at least 1")]
    ZeroBatch,
    #[error("no sample sets given")]
    NoSamples,
    #[error("sample of {source_id} references unknown document {doc_id}")]
    UnknownDocument { source_id: String, doc_id: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingParams {
    pub target_size: usize,
    pub docs_per_query: usize,
}

impl Default for SamplingParams {
    fn default() -> Self {
        Self { target_size: 300, docs_per_query: 4 }
    }
}

/// Documents sampled from one collection, in sampling order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSet {
    pub source_id: String,
    pub doc_ids: Vec<String>,
    pub queries_issued: usize,
}

/// Samples a collection through its search interface.
///
/// Each probe is a single-term query. The first term is drawn uniformly from
/// the collection vocabulary; later terms are drawn uniformly from the not yet
/// issued terms of documents sampled so far. When that learned vocabulary runs
/// dry the sampler restarts from an unissued term of the full vocabulary, so a
/// small collection is always exhausted. Each probe adds at most
/// `docs_per_query` unseen documents, and the sample stops at exactly
/// `min(target_size, doc_count)` documents.
pub fn query_based_sample(
    index: &Index,
    source_id: &str,
    params: SamplingParams,
    seed: u64,
) -> Result<SampleSet, SamplingError> {
    if params.target_size == 0 {
        return Err(SamplingError::ZeroTarget);
    }
    if params.docs_per_query == 0 {
        return Err(SamplingError::ZeroBatch);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_terms = index.terms().len();
    let target = params.target_size.min(index.doc_count());

    let mut issued = alloc::vec![false; n_terms];
    let mut learned: Vec<u32> = Vec::new();
    let mut in_learned = alloc::vec![false; n_terms];
    let mut sampled = alloc::vec![false; index.doc_count()];
    let mut doc_ids = Vec::with_capacity(target);
    let mut queries_issued = 0;
    let mut issued_count = 0;

    while doc_ids.len() < target && issued_count < n_terms {
        let term = if learned.is_empty() {
            // restart from the full vocabulary
            let remaining = n_terms - issued_count;
            let pick = rng.random_range(0..remaining);
            issued.iter().enumerate().filter(|(_, &done)| !done).nth(pick).map(|(t, _)| t).unwrap()
        } else {
            let pick = rng.random_range(0..learned.len());
            learned.swap_remove(pick) as usize
        };
        issued[term] = true;
        issued_count += 1;
        queries_issued += 1;

        let probe = [index.terms()[term].clone()];
        let ranked = index.search("qbs", source_id, &probe, index.doc_count());
        let mut added = 0;
        for entry in ranked.entries {
            if added == params.docs_per_query || doc_ids.len() == target {
                break;
            }
            let num = index.doc_num(&entry.doc_id).expect("search returns indexed docs");
            if sampled[num] {
                continue;
            }
            sampled[num] = true;
            added += 1;
            for &t in index.doc_term_nums(num) {
                let t = t as usize;
                if !issued[t] && !in_learned[t] {
                    in_learned[t] = true;
                    learned.push(t as u32);
                }
            }
            doc_ids.push(entry.doc_id);
        }
    }
    Ok(SampleSet { source_id: source_id.into(), doc_ids, queries_issued })
}

/// One index over the union of all sampled documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralIndex {
    pub index: Index,
    /// Collections whose sample contributed each document.
    pub sources: BTreeMap<String, Vec<String>>,
}

/// Indexes the deduplicated union of the sample sets.
pub fn build_central_index(
    samples: &[SampleSet],
    corpus: &CollectionSet,
    bm25: Bm25,
) -> Result<CentralIndex, SamplingError> {
    if samples.is_empty() {
        return Err(SamplingError::NoSamples);
    }
    let mut sources: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for sample in samples {
        for doc_id in &sample.doc_ids {
            let known = corpus.document(doc_id).is_some()
                && corpus.members(&sample.source_id).is_some_and(|m| m.binary_search(doc_id).is_ok());
            if !known {
                return Err(SamplingError::UnknownDocument {
                    source_id: sample.source_id.clone(),
                    doc_id: doc_id.clone(),
                });
            }
            sources.entry(doc_id.clone()).or_default().insert(sample.source_id.clone());
        }
    }
    let index = Index::from_tokens(
        sources.keys().map(|id| (id.clone(), corpus.document(id).expect("checked above").tokens())),
        bm25,
    )?;
    let sources = sources.into_iter().map(|(d, s)| (d, s.into_iter().collect())).collect();
    Ok(CentralIndex { index, sources })
}
