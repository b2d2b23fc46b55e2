//! Documents, topical partitioning by category code, and query construction.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{tokenize, tokenize_into};

/// Description words that contribute to a query by default.
pub const DEFAULT_DESC_WORD_LIMIT: usize = 500;
/// Maximum query length in tokens by default.
pub const DEFAULT_TOTAL_WORD_LIMIT: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("category code is empty")]
    EmptyCode,
    #[error("document has an empty id")]
    EmptyDocId,
    #[error("document {0} has no category codes")]
    NoCodes(String),
    #[error("duplicate document id {0}")]
    DuplicateDocId(String),
    #[error("topic {0} has no text in any field")]
    EmptyQuery(String),
    #[error("corpus is empty")]
    EmptyCorpus,
}

/// The four text fields carried by patents and topics.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextFields {
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub description: String,
    pub claims: String,
}

impl TextFields {
    pub fn is_empty(&self) -> bool {
        [&self.title, &self.abstract_text, &self.description, &self.claims]
            .iter()
            .all(|f| f.trim().is_empty())
    }

    /// Tokens of all four fields in order, used at index time.
    pub fn tokens(&self) -> Vec<String> {
        let mut out = Vec::new();
        for field in [&self.title, &self.abstract_text, &self.description, &self.claims] {
            tokenize_into(field, &mut out);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub text: TextFields,
    /// Level-3 category codes, trimmed, deduplicated and sorted.
    pub codes: Vec<String>,
}

impl Document {
    /// Validates the id and reduces every raw code to its level-3 prefix.
    pub fn new<S: AsRef<str>>(
        doc_id: impl Into<String>,
        text: TextFields,
        raw_codes: &[S],
    ) -> Result<Self, CorpusError> {
        let doc_id = doc_id.into().trim().to_string();
        if doc_id.is_empty() {
            return Err(CorpusError::EmptyDocId);
        }
        if raw_codes.is_empty() {
            return Err(CorpusError::NoCodes(doc_id));
        }
        let codes = raw_codes
            .iter()
            .map(|c| partition_code(c.as_ref()))
            .collect::<Result<BTreeSet<_>, _>>()?;
        Ok(Self { doc_id, text, codes: codes.into_iter().collect() })
    }

    pub fn tokens(&self) -> Vec<String> {
        self.text.tokens()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topic {
    pub topic_id: String,
    pub text: TextFields,
}

/// Reduces a classification code to its level-3 (subclass) prefix: the first
/// four characters, e.g. `H04L21/00` becomes `H04L`.
pub fn partition_code(raw_code: &str) -> Result<String, CorpusError> {
    let trimmed = raw_code.trim();
    if trimmed.is_empty() {
        return Err(CorpusError::EmptyCode);
    }
    let prefix: String = trimmed.chars().take(4).collect();
    Ok(prefix.trim_end().to_string())
}

/// Builds the token list for a topic: title, abstract, the first
/// `desc_word_limit` whitespace-separated words of the description, then
/// claims; truncated to `total_word_limit` tokens.
pub fn build_query(
    topic: &Topic,
    desc_word_limit: usize,
    total_word_limit: usize,
) -> Result<Vec<String>, CorpusError> {
    let t = &topic.text;
    if t.is_empty() {
        return Err(CorpusError::EmptyQuery(topic.topic_id.clone()));
    }
    let mut tokens = tokenize(&t.title);
    tokenize_into(&t.abstract_text, &mut tokens);
    let description: Vec<&str> = t.description.split_whitespace().take(desc_word_limit).collect();
    for word in description {
        tokenize_into(word, &mut tokens);
    }
    tokenize_into(&t.claims, &mut tokens);
    tokens.truncate(total_word_limit);
    Ok(tokens)
}

/// A corpus split into topical collections, one per level-3 code.
///
/// A document with several codes is a member of every matching collection.
/// Collections and member lists are kept in lexicographic order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectionSet {
    collections: BTreeMap<String, Vec<String>>,
    corpus: BTreeMap<String, Document>,
}

impl CollectionSet {
    pub fn from_documents(docs: impl IntoIterator<Item = Document>) -> Result<Self, CorpusError> {
        let mut corpus = BTreeMap::new();
        let mut collections: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for doc in docs {
            if doc.codes.is_empty() {
                return Err(CorpusError::NoCodes(doc.doc_id));
            }
            if corpus.contains_key(&doc.doc_id) {
                return Err(CorpusError::DuplicateDocId(doc.doc_id));
            }
            for code in &doc.codes {
                collections.entry(code.clone()).or_default().push(doc.doc_id.clone());
            }
            corpus.insert(doc.doc_id.clone(), doc);
        }
        if corpus.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        for members in collections.values_mut() {
            members.sort();
        }
        Ok(Self { collections, corpus })
    }

    pub fn collections(&self) -> &BTreeMap<String, Vec<String>> {
        &self.collections
    }

    pub fn codes(&self) -> impl Iterator<Item = &str> {
        self.collections.keys().map(String::as_str)
    }

    pub fn members(&self, code: &str) -> Option<&[String]> {
        self.collections.get(code).map(Vec::as_slice)
    }

    pub fn corpus(&self) -> &BTreeMap<String, Document> {
        &self.corpus
    }

    pub fn document(&self, doc_id: &str) -> Option<&Document> {
        self.corpus.get(doc_id)
    }

    /// Documents of one collection, in member order.
    pub fn collection_documents(&self, code: &str) -> Vec<&Document> {
        self.members(code)
            .unwrap_or_default()
            .iter()
            .filter_map(|id| self.corpus.get(id))
            .collect()
    }

    pub fn num_collections(&self) -> usize {
        self.collections.len()
    }

    pub fn num_documents(&self) -> usize {
        self.corpus.len()
    }
}
