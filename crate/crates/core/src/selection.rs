//! CORI collection selection over sampled statistics.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::CollectionSet;
use crate::sampling::SampleSet;

/// Default belief floor.
pub const CORI_B: f64 = 0.4;
const CORI_DF_BASE: f64 = 50.0;
const CORI_DF_FACTOR: f64 = 150.0;

/// Number of sources searched per query by default.
pub const DEFAULT_N_SELECT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectionError {
    #[error("no collections to build statistics from")]
    NoCollections,
    #[error("sample of {source_id} references unknown document {doc_id}")]
    UnknownDocument { source_id: String, doc_id: String },
    #[error("query has no terms")]
    EmptyQuery,
    #[error("n_select must be at least 1")]
    ZeroSelect,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceStats {
    pub df: BTreeMap<String, u32>,
    pub cw: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectionStats {
    pub sources: BTreeMap<String, SourceStats>,
    /// Number of collections containing each term.
    pub cf: BTreeMap<String, u32>,
    pub avg_cw: f64,
}

impl CollectionStats {
    fn from_docs<'a>(
        per_source: impl Iterator<Item = (String, Vec<Vec<String>>)> + 'a,
    ) -> Result<Self, SelectionError> {
        let mut sources = BTreeMap::new();
        let mut cf: BTreeMap<String, u32> = BTreeMap::new();
        for (source_id, docs) in per_source {
            let mut stats = SourceStats::default();
            for tokens in docs {
                stats.cw += tokens.len() as u64;
                let distinct: BTreeSet<String> = tokens.into_iter().collect();
                for t in distinct {
                    *stats.df.entry(t).or_default() += 1;
                }
            }
            for t in stats.df.keys() {
                *cf.entry(t.clone()).or_default() += 1;
            }
            sources.insert(source_id, stats);
        }
        if sources.is_empty() {
            return Err(SelectionError::NoCollections);
        }
        let avg_cw = sources.values().map(|s: &SourceStats| s.cw as f64).sum::<f64>() / sources.len() as f64;
        Ok(Self { sources, cf, avg_cw })
    }

    pub fn num_collections(&self) -> usize {
        self.sources.len()
    }

    pub fn cf(&self, term: &str) -> u32 {
        self.cf.get(term).copied().unwrap_or(0)
    }
}

/// Statistics over sampled documents only.
pub fn build_stats(samples: &[SampleSet], corpus: &CollectionSet) -> Result<CollectionStats, SelectionError> {
    let mut per_source = Vec::with_capacity(samples.len());
    for s in samples {
        let mut docs = Vec::with_capacity(s.doc_ids.len());
        for id in &s.doc_ids {
            let doc = corpus.document(id).ok_or_else(|| SelectionError::UnknownDocument {
                source_id: s.source_id.clone(),
                doc_id: id.clone(),
            })?;
            docs.push(doc.tokens());
        }
        per_source.push((s.source_id.clone(), docs));
    }
    CollectionStats::from_docs(per_source.into_iter())
}

/// Statistics over complete collections, for cooperative runs that trust
/// remote statistics.
pub fn build_full_stats(corpus: &CollectionSet) -> Result<CollectionStats, SelectionError> {
    CollectionStats::from_docs(
        corpus
            .collections()
            .iter()
            .map(|(code, members)| {
                (code.clone(), members.iter().filter_map(|id| corpus.document(id)).map(|d| d.tokens()).collect())
            }),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceScore {
    pub source_id: String,
    pub score: f64,
    pub rank: usize,
}

/// CORI belief of one term in one collection.
///
/// `T = df / (df + 50 + 150 * cw / avg_cw)`,
/// `I = ln((C + 0.5) / cf) / ln(C + 1)`, `p = b + (1 - b) * T * I`.
pub fn cori_belief(df: u32, cw: u64, avg_cw: f64, cf: u32, num_collections: usize, b: f64) -> f64 {
    if df == 0 || cf == 0 {
        return b;
    }
    let df = f64::from(df);
    let c = num_collections as f64;
    let t = df / (df + CORI_DF_BASE + CORI_DF_FACTOR * cw as f64 / avg_cw);
    let i = libm::log((c + 0.5) / f64::from(cf)) / libm::log(c + 1.0);
    b + (1.0 - b) * t * i
}

/// Scores every collection by its mean CORI belief over the distinct query
/// terms and returns the best `n_select`, ties broken by source id.
pub fn cori_select(query: &[String], stats: &CollectionStats, n_select: usize) -> Result<Vec<SourceScore>, SelectionError> {
    if n_select == 0 {
        return Err(SelectionError::ZeroSelect);
    }
    let terms: BTreeSet<&str> = query.iter().map(String::as_str).collect();
    if terms.is_empty() {
        return Err(SelectionError::EmptyQuery);
    }
    let c = stats.num_collections();
    let cfs: Vec<u32> = terms.iter().map(|t| stats.cf(t)).collect();
    let mut scored: Vec<(String, f64)> = stats
        .sources
        .iter()
        .map(|(id, s)| {
            let total: f64 = terms
                .iter()
                .zip(&cfs)
                .map(|(t, &cf)| {
                    let df = s.df.get(*t).copied().unwrap_or(0);
                    cori_belief(df, s.cw, stats.avg_cw, cf, c, CORI_B)
                })
                .sum();
            (id.clone(), total / terms.len() as f64)
        })
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| a.0.cmp(&b.0)));
    Ok(scored
        .into_iter()
        .take(n_select)
        .enumerate()
        .map(|(i, (source_id, score))| SourceScore { source_id, score, rank: i + 1 })
        .collect())
}
