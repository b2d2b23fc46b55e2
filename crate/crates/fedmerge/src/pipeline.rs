//! End-to-end experiment: build, sample, select, search, merge, evaluate.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use fedmerge_core::corpus::{build_query, CollectionSet, Document, Topic};
use fedmerge_core::engine::{build_index, Index, RankedList};
use fedmerge_core::eval::{evaluate, EvalResult, Qrels};
use fedmerge_core::federation::{draw_distortions, ScoreDistortion};
use fedmerge_core::merging::{
    assign_artificial_scores, cori_merge, finalize, gm_merge, mm_merge, ssl_merge, Contribution, LearnedModel,
    MergedEntry, MergedRun, CENTRAL_SOURCE,
};
use fedmerge_core::sampling::{build_central_index, query_based_sample, CentralIndex, SampleSet};
use fedmerge_core::seed::derive_seed;
use fedmerge_core::selection::{build_full_stats, build_stats, cori_select, CollectionStats, SourceScore};
use fedmerge_core::synth::SynthCorpus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Mode, StatsSource, Strategy};
use crate::error::{fail, Result, Stage, StageContext};
use crate::formats::{self, load_artifact, read_samples, save_artifact, write_samples};
use crate::hashing::json_digest;
use crate::report::{RunReport, StrategyOutcome};

/// Corpus, topics and judgments, with digests of their content.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub corpus: CollectionSet,
    pub topics: Vec<Topic>,
    pub qrels: Qrels,
    pub corpus_digest: String,
    pub topics_digest: String,
    pub qrels_digest: String,
    /// Malformed records skipped while loading.
    pub rejected_records: usize,
}

impl Inputs {
    pub fn new(documents: Vec<Document>, topics: Vec<Topic>, qrels: Qrels) -> Result<Self> {
        let corpus = CollectionSet::from_documents(documents).stage(Stage::Load)?;
        Ok(Self::from_set(corpus, topics, qrels, 0))
    }

    fn from_set(corpus: CollectionSet, topics: Vec<Topic>, qrels: Qrels, rejected_records: usize) -> Self {
        Self {
            corpus_digest: json_digest(corpus.corpus()),
            topics_digest: json_digest(&topics),
            qrels_digest: json_digest(&qrels),
            corpus,
            topics,
            qrels,
            rejected_records,
        }
    }

    pub fn from_synth(synth: SynthCorpus) -> Result<Self> {
        Self::new(synth.documents, synth.topics, synth.qrels)
    }

    /// Loads the corpus, topics and qrels named in the config.
    pub fn load(cfg: &ExperimentConfig) -> Result<Self> {
        let need = |p: &Option<PathBuf>, what: &str| p.clone().ok_or_else(|| fail(Stage::Config, format!("no {what} path given")));
        let (corpus_path, topics_path, qrels_path) =
            (need(&cfg.corpus, "corpus")?, need(&cfg.topics, "topics")?, need(&cfg.qrels, "qrels")?);
        let corpus = formats::load_corpus(&corpus_path, &cfg.field_map, cfg.skip_malformed).stage(Stage::Load)?;
        let topics = formats::load_topics(&topics_path, &cfg.field_map, cfg.skip_malformed).stage(Stage::Load)?;
        let qrels = formats::load_qrels(&qrels_path).stage(Stage::Load)?;
        let rejected = corpus.rejected.len() + topics.rejected.len();
        Ok(Self::from_set(corpus.value, topics.value, qrels, rejected))
    }
}

/// Collection indexes plus the union index over every document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Indexes {
    pub collections: BTreeMap<String, Index>,
    pub union: Index,
}

/// Everything built once per experiment and shared by all queries.
#[derive(Debug, Clone)]
pub struct Federation {
    pub indexes: Indexes,
    pub samples: Vec<SampleSet>,
    pub central: CentralIndex,
    pub sample_stats: CollectionStats,
    /// Full-collection statistics, built when cooperative runs ask for them.
    pub full_stats: Option<CollectionStats>,
    pub distortions: BTreeMap<String, ScoreDistortion>,
}

/// Whether cached artifacts were reused.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CacheUse {
    pub indexes: bool,
    pub samples: bool,
}

pub fn build_indexes(cfg: &ExperimentConfig, corpus: &CollectionSet) -> Result<Indexes> {
    let codes: Vec<&str> = corpus.codes().collect();
    let collections = codes
        .par_iter()
        .map(|&code| {
            build_index(corpus.collection_documents(code), cfg.bm25)
                .map(|i| (code.to_string(), i))
                .map_err(|e| fail(Stage::Index, format!("collection {code}: {e}")))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    let union = build_index(corpus.corpus().values(), cfg.bm25).stage(Stage::Index)?;
    Ok(Indexes { collections, union })
}

/// Samples every collection, each from its own seed stream.
pub fn sample_collections(cfg: &ExperimentConfig, indexes: &Indexes) -> Result<Vec<SampleSet>> {
    indexes
        .collections
        .par_iter()
        .map(|(code, index)| {
            query_based_sample(index, code, cfg.sampling, derive_seed(cfg.seed, &["sample", code]))
                .map_err(|e| fail(Stage::Sample, format!("collection {code}: {e}")))
        })
        .collect()
}

fn cache_path(cfg: &ExperimentConfig, name: String) -> Option<PathBuf> {
    cfg.cache_dir.as_ref().map(|d| d.join(name))
}

fn cached_indexes(cfg: &ExperimentConfig, inputs: &Inputs) -> Result<(Indexes, bool)> {
    let key = json_digest(&(&inputs.corpus_digest, cfg.bm25));
    let path = cache_path(cfg, format!("indexes-{}.art", &key[..16]));
    if let Some(p) = path.as_deref().filter(|p| p.exists()) {
        if let Ok(idx) = load_artifact::<Indexes>(p, "indexes") {
            if idx.union.validate().is_ok() && idx.collections.values().all(|i| i.validate().is_ok()) {
                return Ok((idx, true));
            }
        }
    }
    let idx = build_indexes(cfg, &inputs.corpus)?;
    if let Some(p) = path {
        save_artifact(&p, "indexes", &idx).stage(Stage::Cache)?;
    }
    Ok((idx, false))
}

fn cached_samples(cfg: &ExperimentConfig, inputs: &Inputs, indexes: &Indexes) -> Result<(Vec<SampleSet>, bool)> {
    let key = json_digest(&(&inputs.corpus_digest, cfg.bm25, cfg.sampling, cfg.seed));
    let path = cache_path(cfg, format!("samples-{}.jsonl", &key[..16]));
    if let Some(p) = path.as_deref().filter(|p| p.exists()) {
        if let Ok(samples) = read_samples(p) {
            return Ok((samples, true));
        }
    }
    let samples = sample_collections(cfg, indexes)?;
    if let Some(p) = path {
        write_samples(&samples, &p).stage(Stage::Cache)?;
    }
    Ok((samples, false))
}

impl Federation {
    pub fn build(cfg: &ExperimentConfig, inputs: &Inputs) -> Result<(Self, CacheUse)> {
        let (indexes, idx_hit) = cached_indexes(cfg, inputs)?;
        let (samples, sample_hit) = cached_samples(cfg, inputs, &indexes)?;
        let central = build_central_index(&samples, &inputs.corpus, cfg.bm25).stage(Stage::Sample)?;
        let sample_stats = build_stats(&samples, &inputs.corpus).stage(Stage::Select)?;
        let full_stats = (cfg.stats == StatsSource::Full && cfg.modes.contains(&Mode::Cooperative))
            .then(|| build_full_stats(&inputs.corpus))
            .transpose()
            .stage(Stage::Select)?;
        let distortions = draw_distortions(inputs.corpus.codes(), cfg.distortion, cfg.seed);
        let fed = Self { indexes, samples, central, sample_stats, full_stats, distortions };
        Ok((fed, CacheUse { indexes: idx_hit, samples: sample_hit }))
    }

    fn stats(&self, mode: Mode) -> &CollectionStats {
        match (mode, &self.full_stats) {
            (Mode::Cooperative, Some(full)) => full,
            _ => &self.sample_stats,
        }
    }
}

/// What the broker sees for one query before merging.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryTrace {
    pub query_id: String,
    pub mode: Mode,
    pub query: Vec<String>,
    pub selected: Vec<SourceScore>,
    /// Non-empty result lists of the selected sources, in selection order,
    /// with the scores the broker receives (artificial in uncooperative
    /// mode).
    pub lists: Vec<RankedList>,
    pub central: RankedList,
}

/// Selects, searches and scores one topic.
pub fn prepare_query(fed: &Federation, cfg: &ExperimentConfig, topic: &Topic, mode: Mode) -> Result<QueryTrace> {
    let query_id = topic.topic_id.clone();
    let query = build_query(topic, cfg.desc_word_limit, cfg.total_word_limit)
        .map_err(|e| fail(Stage::Select, format!("topic {query_id}: {e}")))?;
    let mut trace = QueryTrace {
        query_id: query_id.clone(),
        mode,
        query,
        selected: Vec::new(),
        lists: Vec::new(),
        central: RankedList { query_id: query_id.clone(), source_id: CENTRAL_SOURCE.into(), entries: Vec::new() },
    };
    if trace.query.is_empty() {
        return Ok(trace);
    }
    trace.selected = cori_select(&trace.query, fed.stats(mode), cfg.n_select)
        .map_err(|e| fail(Stage::Select, format!("topic {query_id}: {e}")))?;
    for s in &trace.selected {
        let index = &fed.indexes.collections[&s.source_id];
        let raw = index.search(&query_id, &s.source_id, &trace.query, cfg.k);
        if raw.is_empty() {
            continue;
        }
        let returned = fed.distortions.get(&s.source_id).copied().unwrap_or_default().distort(&raw);
        let list = match mode {
            Mode::Cooperative => returned,
            Mode::Uncooperative => assign_artificial_scores(&returned, s.score)
                .map_err(|e| fail(Stage::Search, format!("topic {query_id}, source {}: {e}", s.source_id)))?,
        };
        trace.lists.push(list);
    }
    trace.central = fed.central.index.search(&query_id, CENTRAL_SOURCE, &trace.query, cfg.central_k);
    Ok(trace)
}

/// Merges one prepared query with a strategy and applies the cutoff.
pub fn merge_query(fed: &Federation, cfg: &ExperimentConfig, trace: &QueryTrace, strategy: Strategy) -> Result<MergedRun> {
    let empty = MergedRun { query_id: trace.query_id.clone(), ..Default::default() };
    if trace.query.is_empty() {
        return Ok(empty);
    }
    if strategy == Strategy::Centralized {
        let list = fed.indexes.union.search(&trace.query_id, CENTRAL_SOURCE, &trace.query, cfg.cutoff);
        let entries = list
            .entries
            .into_iter()
            .map(|e| MergedEntry {
                provenance: vec![Contribution { source_id: CENTRAL_SOURCE.into(), local_score: e.score }],
                doc_id: e.doc_id,
                score: e.score,
                rank: e.rank,
            })
            .collect();
        return Ok(MergedRun { entries, ..empty });
    }
    if trace.lists.is_empty() {
        return Ok(empty);
    }
    let (lists, central, scores) = (&trace.lists[..], &trace.central, &trace.selected[..]);
    let learned = |kind| LearnedModel { kind, params: &cfg.models, seed: cfg.seed };
    let run = match strategy {
        Strategy::Cori => cori_merge(lists, scores),
        Strategy::Ssl => ssl_merge(lists, central, scores, &cfg.merge, &cfg.models),
        Strategy::Mm(kind) => mm_merge(lists, central, scores, &cfg.merge, learned(kind)),
        Strategy::Gm(kind) => gm_merge(lists, central, scores, &cfg.merge, learned(kind)),
        Strategy::Centralized => unreachable!("handled above"),
    }
    .map_err(|e| fail(Stage::Merge, format!("{strategy}, topic {}: {e}", trace.query_id)))?;
    Ok(finalize(run, cfg.cutoff))
}

/// Result of one experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub report: RunReport,
    /// Final merged runs per mode and strategy, keyed by query id.
    pub runs: BTreeMap<(Mode, Strategy), BTreeMap<String, MergedRun>>,
    /// Selected sources per mode and query.
    pub selections: BTreeMap<Mode, BTreeMap<String, Vec<SourceScore>>>,
    pub cache: CacheUse,
}

impl Experiment {
    pub fn ranked(&self, mode: Mode, strategy: Strategy) -> Option<BTreeMap<String, RankedList>> {
        self.runs.get(&(mode, strategy)).map(|runs| runs.iter().map(|(q, r)| (q.clone(), r.to_ranked_list())).collect())
    }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().stage(Stage::Config)?;
    Ok(pool.install(f))
}

pub fn run_experiment(cfg: &ExperimentConfig, inputs: &Inputs) -> Result<Experiment> {
    cfg.validate().stage(Stage::Config)?;
    in_pool(cfg.threads, || run_inner(cfg, inputs))?
}

fn run_inner(cfg: &ExperimentConfig, inputs: &Inputs) -> Result<Experiment> {
    let (fed, cache) = Federation::build(cfg, inputs)?;
    let topics: Vec<&Topic> = match cfg.max_topics {
        0 => inputs.topics.iter().collect(),
        n => inputs.topics.iter().take(n).collect(),
    };
    let in_scope: BTreeSet<String> = topics.iter().map(|t| t.topic_id.clone()).collect();

    let mut runs = BTreeMap::new();
    let mut selections = BTreeMap::new();
    let mut outcomes = Vec::new();
    let mut empty_queries = BTreeMap::new();
    for &mode in &cfg.modes {
        let traces: Vec<QueryTrace> =
            topics.par_iter().map(|t| prepare_query(&fed, cfg, t, mode)).collect::<Result<_>>()?;
        empty_queries.insert(mode, traces.iter().filter(|t| t.query.is_empty()).count());
        selections.insert(mode, traces.iter().map(|t| (t.query_id.clone(), t.selected.clone())).collect());
        for &strategy in &cfg.strategies {
            let merged: Vec<MergedRun> =
                traces.par_iter().map(|t| merge_query(&fed, cfg, t, strategy)).collect::<Result<_>>()?;
            let by_query: BTreeMap<String, MergedRun> = merged.into_iter().map(|r| (r.query_id.clone(), r)).collect();
            let ranked = by_query.iter().map(|(q, r)| (q.clone(), r.to_ranked_list())).collect();
            let eval: EvalResult = evaluate(&ranked, &inputs.qrels, cfg.cutoff, Some(&in_scope));
            outcomes.push(StrategyOutcome {
                strategy,
                mode,
                fallback_sources: by_query.values().map(|r| r.fallback_sources.len()).sum(),
                fallback_queries: by_query.values().filter(|r| r.query_fallback).count(),
                eval,
            });
            runs.insert((mode, strategy), by_query);
        }
    }
    let report = RunReport::new(cfg, inputs, fed.indexes.collections.len(), in_scope.len(), empty_queries, outcomes);
    Ok(Experiment { report, runs, selections, cache })
}

/// Writes every artifact of an experiment under `out`.
pub fn write_outputs(exp: &Experiment, out: &Path) -> Result<()> {
    for ((mode, strategy), runs) in &exp.runs {
        let lists: Vec<RankedList> = runs.values().map(MergedRun::to_ranked_list).collect();
        let path = out.join("runs").join(mode.name()).join(format!("{strategy}.run"));
        formats::write_run(&lists, &path, &format!("{strategy}-{mode}")).stage(Stage::Report)?;
    }
    exp.report.write(out, &exp.selections)
}
