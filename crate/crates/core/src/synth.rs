//! Seeded synthetic patent corpus with topical collections and judgments.
//!
//! Each collection (a level-3 code) holds several subtopics. A document is
//! written from a mixture of its subtopic's terms, its home collection's terms
//! and a Zipfian background vocabulary. Subtopic terms come from a concept
//! pool shared by all subtopics of a collection. Some documents of a subtopic
//! are filed under a sister collection, and some carry both codes, so
//! relevant documents are spread across sources. Every topic is written from one subtopic and its
//! relevant set is that subtopic's documents.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Document, TextFields, Topic};
use crate::eval::Qrels;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_collections: usize,
    pub subtopics_per_collection: usize,
    pub min_docs_per_subtopic: usize,
    pub max_docs_per_subtopic: usize,
    pub n_topics: usize,
    pub background_vocab: usize,
    pub collection_vocab: usize,
    /// Concept terms per collection; each subtopic draws its own terms from
    /// this pool, so sibling subtopics share vocabulary.
    pub concept_pool: usize,
    pub subtopic_vocab: usize,
    /// Range of the per-document share of subtopic terms.
    pub subtopic_share: (f64, f64),
    /// Range of the per-document share of collection terms.
    pub collection_share: (f64, f64),
    /// Probability that a document is filed under its subtopic's sister
    /// collection instead of the home collection.
    pub sister_prob: f64,
    /// Probability that a document carries both codes.
    pub multi_code_prob: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_collections: 30,
            subtopics_per_collection: 8,
            min_docs_per_subtopic: 6,
            max_docs_per_subtopic: 16,
            n_topics: 60,
            background_vocab: 4000,
            collection_vocab: 60,
            concept_pool: 60,
            subtopic_vocab: 25,
            subtopic_share: (0.02, 0.08),
            collection_share: (0.1, 0.25),
            sister_prob: 0.2,
            multi_code_prob: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthCorpus {
    pub documents: Vec<Document>,
    pub topics: Vec<Topic>,
    pub qrels: Qrels,
}

struct Zipf {
    cdf: Vec<f64>,
}

impl Zipf {
    fn new(n: usize) -> Self {
        let mut acc = 0.0;
        let cdf = (1..=n)
            .map(|i| {
                acc += 1.0 / i as f64;
                acc
            })
            .collect();
        Self { cdf }
    }

    fn draw(&self, rng: &mut impl Rng) -> usize {
        let u = rng.random_range(0.0..*self.cdf.last().unwrap());
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

struct Writer {
    background: Zipf,
    collection: Zipf,
    subtopic: Zipf,
    /// Concept ids of each (collection, subtopic), most frequent first.
    concepts: Vec<Vec<Vec<usize>>>,
    subtopic_share: (f64, f64),
    collection_share: (f64, f64),
}

impl Writer {
    fn words(&self, rng: &mut ChaCha8Rng, n: usize, coll: usize, sub: usize, p_sub: f64, p_coll: f64) -> String {
        let mut out = String::new();
        for i in 0..n {
            if i > 0 {
                out.push(' ');
            }
            let u: f64 = rng.random();
            let w = if u < p_sub {
                let terms = &self.concepts[coll][sub];
                format!("k{coll}x{}", terms[self.subtopic.draw(rng).min(terms.len() - 1)])
            } else if u < p_sub + p_coll {
                format!("c{coll}x{}", self.collection.draw(rng))
            } else {
                format!("b{}", self.background.draw(rng))
            };
            out.push_str(&w);
        }
        out
    }

    fn fields(&self, rng: &mut ChaCha8Rng, coll: usize, sub: usize, desc_words: (usize, usize)) -> TextFields {
        let p_sub: f64 = rng.random_range(self.subtopic_share.0..=self.subtopic_share.1);
        let p_coll: f64 = rng.random_range(self.collection_share.0..=self.collection_share.1);
        let lengths = [
            rng.random_range(5..10),
            rng.random_range(30..60),
            rng.random_range(desc_words.0..desc_words.1),
            rng.random_range(40..90),
        ];
        TextFields {
            title: self.words(rng, lengths[0], coll, sub, (p_sub * 3.0).min(0.8), p_coll),
            abstract_text: self.words(rng, lengths[1], coll, sub, p_sub, p_coll),
            description: self.words(rng, lengths[2], coll, sub, p_sub, p_coll),
            claims: self.words(rng, lengths[3], coll, sub, p_sub, p_coll),
        }
    }
}

fn unique_codes(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    const SECTIONS: &[u8] = b"ABCDEFGH";
    let mut codes = BTreeSet::new();
    while codes.len() < n {
        let section = SECTIONS[rng.random_range(0..SECTIONS.len())] as char;
        let class = rng.random_range(1..100);
        let sub = (b'A' + rng.random_range(0..26u8)) as char;
        codes.insert(format!("{section}{class:02}{sub}"));
    }
    codes.into_iter().collect()
}

/// Generates a corpus, topics and judgments from `seed`.
pub fn generate(cfg: &SynthConfig, seed: u64) -> SynthCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let codes = unique_codes(&mut rng, cfg.n_collections.max(1));
    let n_coll = codes.len();
    let pool = cfg.concept_pool.max(1);
    let per_sub = cfg.subtopic_vocab.clamp(1, pool);
    let concepts = (0..n_coll)
        .map(|_| {
            (0..cfg.subtopics_per_collection)
                .map(|_| rand::seq::index::sample(&mut rng, pool, per_sub).into_vec())
                .collect()
        })
        .collect();
    let writer = Writer {
        background: Zipf::new(cfg.background_vocab.max(1)),
        collection: Zipf::new(cfg.collection_vocab.max(1)),
        subtopic: Zipf::new(per_sub),
        concepts,
        subtopic_share: cfg.subtopic_share,
        collection_share: cfg.collection_share,
    };

    let mut documents = Vec::new();
    let mut subtopic_docs: Vec<((usize, usize), Vec<String>)> = Vec::new();
    for coll in 0..n_coll {
        for sub in 0..cfg.subtopics_per_collection {
            let sister = if n_coll > 1 { (coll + 1 + rng.random_range(0..n_coll - 1)) % n_coll } else { coll };
            let n_docs = rng.random_range(cfg.min_docs_per_subtopic..=cfg.max_docs_per_subtopic.max(cfg.min_docs_per_subtopic));
            let mut ids = Vec::with_capacity(n_docs);
            for _ in 0..n_docs {
                let doc_id = format!("EP-{:06}", documents.len() + 1);
                let text = writer.fields(&mut rng, coll, sub, (150, 300));
                let filed = if rng.random_bool(cfg.sister_prob) { sister } else { coll };
                let mut doc_codes = alloc::vec![format!("{}{}/{:02}", codes[filed], rng.random_range(1..30), rng.random_range(0..100))];
                if rng.random_bool(cfg.multi_code_prob) {
                    let other = if filed == coll { sister } else { coll };
                    doc_codes.push(codes[other].clone());
                }
                let doc = Document::new(doc_id.clone(), text, &doc_codes).expect("generated codes are non-empty");
                documents.push(doc);
                ids.push(doc_id);
            }
            subtopic_docs.push(((coll, sub), ids));
        }
    }

    let mut pool: Vec<usize> = (0..subtopic_docs.len()).collect();
    let mut topics = Vec::new();
    let mut qrels = Qrels::new();
    for t in 0..cfg.n_topics.min(pool.len()) {
        let pick = pool.swap_remove(rng.random_range(0..pool.len()));
        let ((coll, sub), ids) = &subtopic_docs[pick];
        let topic_id = format!("T{:03}", t + 1);
        topics.push(Topic { topic_id: topic_id.clone(), text: writer.fields(&mut rng, *coll, *sub, (400, 800)) });
        qrels.insert(topic_id, ids.iter().cloned().collect());
    }
    SynthCorpus { documents, topics, qrels }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::CollectionSet;

    #[test]
    fn default_size_and_determinism() {
        let cfg = SynthConfig::default();
        let a = generate(&cfg, 7);
        assert!(a.documents.len() >= 2000);
        assert_eq!(a.topics.len(), 60);
        let set = CollectionSet::from_documents(a.documents.clone()).unwrap();
        assert_eq!(set.num_collections(), 30);
        assert!(a.qrels.values().all(|r| r.len() >= cfg.min_docs_per_subtopic));
        assert_eq!(a, generate(&cfg, 7));
        assert_ne!(a.documents[0], generate(&cfg, 8).documents[0]);
    }

    #[test]
    fn zipf_draws_in_range() {
        let z = Zipf::new(10);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let draws: Vec<usize> = (0..1000).map(|_| z.draw(&mut rng)).collect();
        assert!(draws.iter().all(|&d| d < 10));
        assert!(draws.iter().filter(|&&d| d == 0).count() > draws.iter().filter(|&&d| d == 9).count());
    }
}
