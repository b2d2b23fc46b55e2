//! Immutable inverted indexes with BM25 ranking.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Document;

/// Per-collection result depth used unless configured otherwise.
pub const DEFAULT_RESULT_DEPTH: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("cannot build an index from zero documents")]
    NoDocuments,
    #[error("duplicate document id {0}")]
    DuplicateDocId(String),
    #[error("index is inconsistent: {0}")]
    Corrupt(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25 {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25 {
    fn default() -> Self {
        Self { k1: 0.9, b: 0.4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    pub doc: u32,
    pub tf: u32,
}

/// An inverted index over a fixed document set.
///
/// Documents are numbered in ascending `doc_id` order, so ordering by
/// internal number is the same as ordering by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Index {
    terms: Vec<String>,
    postings: Vec<Vec<Posting>>,
    doc_ids: Vec<String>,
    doc_lengths: Vec<u32>,
    /// Sorted distinct term numbers of each document.
    doc_terms: Vec<Vec<u32>>,
    avg_doc_length: f64,
    bm25: Bm25,
}

/// One ranked result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub doc_id: String,
    pub score: f64,
    pub rank: usize,
}

/// Results of one source for one query, best first.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RankedList {
    pub query_id: String,
    pub source_id: String,
    pub entries: Vec<Entry>,
}

/// Score descending, then doc id ascending.
pub fn rank_order(a: (&str, f64), b: (&str, f64)) -> Ordering {
    b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| a.0.cmp(b.0))
}

impl RankedList {
    /// Sorts scored documents into rank order and assigns ranks 1..n.
    /// Later duplicates of a doc id are dropped.
    pub fn from_scored(
        query_id: impl Into<String>,
        source_id: impl Into<String>,
        mut scored: Vec<(String, f64)>,
    ) -> Self {
        scored.sort_by(|a, b| rank_order((&a.0, a.1), (&b.0, b.1)));
        let mut seen = alloc::collections::BTreeSet::new();
        let entries = scored
            .into_iter()
            .filter(|(id, _)| seen.insert(id.clone()))
            .enumerate()
            .map(|(i, (doc_id, score))| Entry { doc_id, score, rank: i + 1 })
            .collect();
        Self { query_id: query_id.into(), source_id: source_id.into(), entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.doc_id.as_str())
    }

    /// Checks rank contiguity, ordering and uniqueness.
    pub fn is_well_formed(&self) -> bool {
        let mut seen = alloc::collections::BTreeSet::new();
        self.entries.iter().enumerate().all(|(i, e)| e.rank == i + 1 && seen.insert(&e.doc_id))
            && self.entries.windows(2).all(|w| {
                rank_order((&w[0].doc_id, w[0].score), (&w[1].doc_id, w[1].score)) == Ordering::Less
            })
    }

    pub fn truncate(&mut self, k: usize) {
        self.entries.truncate(k);
    }
}

impl Index {
    /// Builds an index from already tokenized documents.
    pub fn from_tokens<I, S>(docs: I, bm25: Bm25) -> Result<Self, EngineError>
    where
        I: IntoIterator<Item = (S, Vec<String>)>,
        S: Into<String>,
    {
        let mut docs: Vec<(String, Vec<String>)> =
            docs.into_iter().map(|(id, toks)| (id.into(), toks)).collect();
        if docs.is_empty() {
            return Err(EngineError::NoDocuments);
        }
        docs.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = docs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(EngineError::DuplicateDocId(w[0].0.clone()));
        }

        let mut vocab: BTreeMap<&str, Vec<Posting>> = BTreeMap::new();
        let mut doc_lengths = Vec::with_capacity(docs.len());
        for (num, (_, tokens)) in docs.iter().enumerate() {
            doc_lengths.push(tokens.len() as u32);
            let mut tf: BTreeMap<&str, u32> = BTreeMap::new();
            for t in tokens {
                *tf.entry(t.as_str()).or_default() += 1;
            }
            for (t, n) in tf {
                vocab.entry(t).or_default().push(Posting { doc: num as u32, tf: n });
            }
        }

        let mut doc_terms = vec![Vec::new(); docs.len()];
        let mut terms = Vec::with_capacity(vocab.len());
        let mut postings = Vec::with_capacity(vocab.len());
        for (term_num, (term, list)) in vocab.into_iter().enumerate() {
            for p in &list {
                doc_terms[p.doc as usize].push(term_num as u32);
            }
            terms.push(String::from(term));
            postings.push(list);
        }
        let total: u64 = doc_lengths.iter().map(|&l| u64::from(l)).sum();
        let avg_doc_length = total as f64 / doc_lengths.len() as f64;
        Ok(Self {
            terms,
            postings,
            doc_ids: docs.into_iter().map(|(id, _)| id).collect(),
            doc_lengths,
            doc_terms,
            avg_doc_length,
            bm25,
        })
    }

    pub fn doc_count(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn avg_doc_length(&self) -> f64 {
        self.avg_doc_length
    }

    pub fn bm25(&self) -> Bm25 {
        self.bm25
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn contains_doc(&self, doc_id: &str) -> bool {
        self.doc_num(doc_id).is_some()
    }

    pub fn doc_num(&self, doc_id: &str) -> Option<usize> {
        self.doc_ids.binary_search_by(|d| d.as_str().cmp(doc_id)).ok()
    }

    pub fn doc_length(&self, doc_id: &str) -> Option<u32> {
        self.doc_num(doc_id).map(|n| self.doc_lengths[n])
    }

    /// Vocabulary in lexicographic order.
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term_num(&self, term: &str) -> Option<usize> {
        self.terms.binary_search_by(|t| t.as_str().cmp(term)).ok()
    }

    /// Number of documents containing `term`.
    pub fn df(&self, term: &str) -> u32 {
        self.term_num(term).map_or(0, |n| self.postings[n].len() as u32)
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.term_num(term).map_or(&[], |n| &self.postings[n])
    }

    /// Distinct term numbers of a document, ascending.
    pub fn doc_term_nums(&self, doc_num: usize) -> &[u32] {
        &self.doc_terms[doc_num]
    }

    /// Verifies internal invariants; used after deserialization.
    pub fn validate(&self) -> Result<(), EngineError> {
        let n = self.doc_ids.len();
        if n == 0 {
            return Err(EngineError::NoDocuments);
        }
        if self.doc_lengths.len() != n || self.doc_terms.len() != n {
            return Err(EngineError::Corrupt("per-document arrays differ in length"));
        }
        if self.terms.len() != self.postings.len() {
            return Err(EngineError::Corrupt("terms and postings differ in length"));
        }
        if !self.doc_ids.windows(2).all(|w| w[0] < w[1]) || !self.terms.windows(2).all(|w| w[0] < w[1]) {
            return Err(EngineError::Corrupt("ids or terms not strictly sorted"));
        }
        for list in &self.postings {
            if !list.windows(2).all(|w| w[0].doc < w[1].doc) || list.iter().any(|p| p.doc as usize >= n || p.tf == 0) {
                return Err(EngineError::Corrupt("bad posting list"));
            }
        }
        Ok(())
    }

    fn idf(&self, df: usize) -> f64 {
        let n = self.doc_count() as f64;
        let df = df as f64;
        libm::log(1.0 + (n - df + 0.5) / (df + 0.5))
    }

    /// BM25 scores of every document matching at least one query token.
    /// Repeated query tokens count once per occurrence.
    pub fn score_all(&self, query: &[String]) -> Vec<(usize, f64)> {
        let mut qtf: BTreeMap<usize, u32> = BTreeMap::new();
        for t in query {
            if let Some(n) = self.term_num(t) {
                *qtf.entry(n).or_default() += 1;
            }
        }
        let mut acc = vec![0.0f64; self.doc_count()];
        let mut hit = vec![false; self.doc_count()];
        let Bm25 { k1, b } = self.bm25;
        for (term, count) in qtf {
            let list = &self.postings[term];
            let idf = self.idf(list.len());
            for p in list {
                let d = p.doc as usize;
                let tf = f64::from(p.tf);
                let norm = 1.0 - b + b * f64::from(self.doc_lengths[d]) / self.avg_doc_length;
                acc[d] += f64::from(count) * idf * tf * (k1 + 1.0) / (tf + k1 * norm);
                hit[d] = true;
            }
        }
        acc.into_iter().enumerate().filter(|&(d, _)| hit[d]).collect()
    }

    /// Top-`k` documents by BM25. An empty or fully out-of-vocabulary query
    /// yields an empty list.
    pub fn search(&self, query_id: &str, source_id: &str, query: &[String], k: usize) -> RankedList {
        let mut scored = self.score_all(query);
        // doc numbers follow doc_id order, so this is score desc then id asc
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));
        scored.truncate(k);
        let entries = scored
            .into_iter()
            .enumerate()
            .map(|(i, (d, score))| Entry { doc_id: self.doc_ids[d].clone(), score, rank: i + 1 })
            .collect();
        RankedList { query_id: query_id.into(), source_id: source_id.into(), entries }
    }
}

/// Tokenizes and indexes full documents.
pub fn build_index<'a>(docs: impl IntoIterator<Item = &'a Document>, bm25: Bm25) -> Result<Index, EngineError> {
    Index::from_tokens(docs.into_iter().map(|d| (d.doc_id.clone(), d.tokens())), bm25)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn idx(docs: &[(&str, &str)]) -> Index {
        Index::from_tokens(docs.iter().map(|(id, t)| (id.to_string(), tokenize(t))), Bm25::default()).unwrap()
    }

    fn q(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn raw_tokens_are_counted_as_given() {
        let toks = vec!["a".to_string(), "b".to_string(), "a".to_string()];
        let i = Index::from_tokens([("d".to_string(), toks)], Bm25::default()).unwrap();
        assert_eq!(i.postings("a"), [Posting { doc: 0, tf: 2 }]);
        assert_eq!(i.postings("b"), [Posting { doc: 0, tf: 1 }]);
        assert_eq!(i.doc_length("d"), Some(3));
    }

    #[test]
    fn single_document_counts() {
        let i = idx(&[("d", "x y x")]);
        assert_eq!(i.postings("x"), [Posting { doc: 0, tf: 2 }]);
        assert_eq!(i.postings("y"), [Posting { doc: 0, tf: 1 }]);
        assert_eq!(i.doc_length("d"), Some(3));
        assert_eq!(i.doc_count(), 1);
        assert_eq!(i.avg_doc_length(), 3.0);
    }

    #[test]
    fn document_frequency() {
        let i = idx(&[("d1", "t x"), ("d2", "t y"), ("d3", "z")]);
        assert_eq!(i.df("t"), 2);
        assert_eq!(i.df("missing"), 0);
        assert!(i.validate().is_ok());
    }

    #[test]
    fn build_errors() {
        let empty: Vec<(String, Vec<String>)> = Vec::new();
        assert_eq!(Index::from_tokens(empty, Bm25::default()), Err(EngineError::NoDocuments));
        let dup = Index::from_tokens([("d", q("a")), ("d", q("b"))], Bm25::default());
        assert_eq!(dup, Err(EngineError::DuplicateDocId("d".into())));
    }

    #[test]
    fn search_basics() {
        let i = idx(&[("d1", "rotor blade"), ("d2", "gear box"), ("d3", "gear shaft")]);
        let r = i.search("q", "S", &q("rotor"), 10);
        assert_eq!(r.len(), 1);
        assert_eq!(r.entries[0].doc_id, "d1");
        assert_eq!(r.entries[0].rank, 1);
        assert!(r.entries[0].score > 0.0);
        assert!(i.search("q", "S", &q("absent"), 10).is_empty());
        assert!(i.search("q", "S", &[], 10).is_empty());
        assert_eq!(i.search("q", "S", &q("gear shaft rotor"), 2).len(), 2);
    }

    #[test]
    fn identical_documents_tie_by_id() {
        let i = idx(&[("d2", "gear box"), ("d1", "gear box"), ("d3", "rotor")]);
        let r = i.search("q", "S", &q("gear"), 10);
        // idf = ln(1 + (3 - 2 + 0.5) / 2.5), tf = 1, dl = avgdl * 6/5
        let idf = libm::log(1.0 + 1.5 / 2.5);
        let norm = 1.0 - 0.4 + 0.4 * 2.0 / (5.0 / 3.0);
        let expected = idf * 1.9 / (1.0 + 0.9 * norm);
        assert_eq!(r.entries[0].doc_id, "d1");
        assert_eq!(r.entries[1].doc_id, "d2");
        assert_eq!(r.entries[0].score, r.entries[1].score);
        assert!((r.entries[0].score - expected).abs() < 1e-12);
        assert!(r.is_well_formed());
    }

    #[test]
    fn from_scored_orders_and_dedups() {
        let r = RankedList::from_scored(
            "q",
            "S",
            alloc::vec![("b".into(), 1.0), ("a".into(), 1.0), ("c".into(), 2.0), ("a".into(), 0.5)],
        );
        let ids: Vec<_> = r.doc_ids().collect();
        assert_eq!(ids, ["c", "a", "b"]);
        assert!(r.is_well_formed());
    }

    fn corpus_strategy() -> impl Strategy<Value = Vec<Vec<u8>>> {
        prop::collection::vec(prop::collection::vec(0u8..12, 1..15), 1..12)
    }

    fn to_tokens(doc: &[u8]) -> Vec<String> {
        doc.iter().map(|t| alloc::format!("t{t}")).collect()
    }

    proptest! {
        #[test]
        fn extra_matching_term_never_lowers_score(docs in corpus_strategy(), query in prop::collection::vec(0u8..12, 0..6), extra in 0u8..12) {
            let index = Index::from_tokens(
                docs.iter().enumerate().map(|(i, d)| (alloc::format!("d{i:03}"), to_tokens(d))),
                Bm25::default(),
            ).unwrap();
            let base = index.score_all(&to_tokens(&query));
            let mut longer = query.clone();
            longer.push(extra);
            let more: BTreeMap<usize, f64> = index.score_all(&to_tokens(&longer)).into_iter().collect();
            for (d, s) in base {
                prop_assert!(more[&d] >= s);
            }
        }

        #[test]
        fn search_is_well_formed_and_deterministic(docs in corpus_strategy(), query in prop::collection::vec(0u8..12, 1..6), k in 1usize..20) {
            let index = Index::from_tokens(
                docs.iter().enumerate().map(|(i, d)| (alloc::format!("d{i:03}"), to_tokens(d))),
                Bm25::default(),
            ).unwrap();
            let a = index.search("q", "S", &to_tokens(&query), k);
            prop_assert!(a.is_well_formed());
            prop_assert!(a.len() <= k);
            prop_assert_eq!(a, index.search("q", "S", &to_tokens(&query), k));
            prop_assert!(index.validate().is_ok());
        }
    }
}
