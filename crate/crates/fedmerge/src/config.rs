//! Experiment configuration: flat `key = value` files plus overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fedmerge_core::corpus::{DEFAULT_DESC_WORD_LIMIT, DEFAULT_TOTAL_WORD_LIMIT};
use fedmerge_core::engine::{Bm25, DEFAULT_RESULT_DEPTH};
use fedmerge_core::eval::DEFAULT_CUTOFF;
use fedmerge_core::federation::DistortionMode;
use fedmerge_core::merging::{MergeParams, OverlapScoring};
use fedmerge_core::mlmodels::{ModelKind, ModelParams};
use fedmerge_core::sampling::SamplingParams;
use fedmerge_core::selection::DEFAULT_N_SELECT;
use serde::{Deserialize, Serialize};

use crate::formats::FieldMap;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`: {reason}")]
    BadValue { key: String, value: String, reason: String },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Cooperative,
    Uncooperative,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Cooperative, Mode::Uncooperative];

    pub fn name(self) -> &'static str {
        match self {
            Self::Cooperative => "cooperative",
            Self::Uncooperative => "uncooperative",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cooperative" | "coop" => Ok(Self::Cooperative),
            "uncooperative" | "uncoop" => Ok(Self::Uncooperative),
            _ => Err("expected cooperative or uncooperative".into()),
        }
    }
}

/// One merging strategy (or the centralized baseline).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Strategy {
    Cori,
    Ssl,
    Mm(ModelKind),
    Gm(ModelKind),
    Centralized,
}

impl Strategy {
    /// Every strategy, in the order reports list them.
    pub const ALL: [Strategy; 14] = [
        Strategy::Cori,
        Strategy::Ssl,
        Strategy::Mm(ModelKind::Linear),
        Strategy::Mm(ModelKind::Poly2),
        Strategy::Mm(ModelKind::Poly3),
        Strategy::Mm(ModelKind::Tree),
        Strategy::Mm(ModelKind::Forest),
        Strategy::Mm(ModelKind::Svr),
        Strategy::Gm(ModelKind::Linear),
        Strategy::Gm(ModelKind::Tree),
        Strategy::Gm(ModelKind::Forest),
        Strategy::Gm(ModelKind::Svr),
        Strategy::Gm(ModelKind::Mlp),
        Strategy::Centralized,
    ];

    pub fn name(self) -> String {
        match self {
            Self::Cori => "cori".into(),
            Self::Ssl => "ssl".into(),
            Self::Mm(k) => format!("mm-{k}"),
            Self::Gm(k) => format!("gm-{k}"),
            Self::Centralized => "centralized".into(),
        }
    }

    /// Position in [`Strategy::ALL`].
    pub fn order(self) -> usize {
        Self::ALL.iter().position(|&s| s == self).expect("every strategy is listed")
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown strategy `{s}`"))
    }
}

impl From<Strategy> for String {
    fn from(s: Strategy) -> String {
        s.name()
    }
}

impl TryFrom<String> for Strategy {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

/// Where selection statistics come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatsSource {
    /// Sampled documents only.
    #[default]
    Sample,
    /// Full collections; honoured in cooperative mode only.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub corpus: Option<PathBuf>,
    pub topics: Option<PathBuf>,
    pub qrels: Option<PathBuf>,
    pub field_map: FieldMap,
    pub skip_malformed: bool,
    pub modes: Vec<Mode>,
    pub strategies: Vec<Strategy>,
    pub n_select: usize,
    pub cutoff: usize,
    /// Per-collection result depth.
    pub k: usize,
    /// Depth of the centralized sample index result list.
    pub central_k: usize,
    pub sampling: SamplingParams,
    pub seed: u64,
    pub distortion: DistortionMode,
    pub stats: StatsSource,
    pub bm25: Bm25,
    pub desc_word_limit: usize,
    pub total_word_limit: usize,
    /// Evaluate only the first n topics (file order); 0 keeps all.
    pub max_topics: usize,
    pub merge: MergeParams,
    pub models: ModelParams,
    /// Worker threads; 0 uses the default pool. Does not affect results.
    pub threads: usize,
    /// Cache directory for indexes and samples. Does not affect results.
    pub cache_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            topics: None,
            qrels: None,
            field_map: FieldMap::default(),
            skip_malformed: false,
            modes: Mode::ALL.to_vec(),
            strategies: Strategy::ALL.to_vec(),
            n_select: DEFAULT_N_SELECT,
            cutoff: DEFAULT_CUTOFF,
            k: DEFAULT_RESULT_DEPTH,
            central_k: 1000,
            sampling: SamplingParams::default(),
            seed: 0,
            distortion: DistortionMode::None,
            stats: StatsSource::Sample,
            bm25: Bm25::default(),
            desc_word_limit: DEFAULT_DESC_WORD_LIMIT,
            total_word_limit: DEFAULT_TOTAL_WORD_LIMIT,
            max_topics: 0,
            merge: MergeParams::default(),
            models: ModelParams::default(),
            threads: 0,
            cache_dir: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| ConfigError::BadValue { key: key.into(), value: value.into(), reason: e.to_string() })
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    let items: Vec<T> = value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| parse(key, s)).collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(ConfigError::BadValue { key: key.into(), value: value.into(), reason: "empty list".into() });
    }
    Ok(items)
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(ConfigError::BadValue { key: key.into(), value: value.into(), reason: "expected true or false".into() }),
    }
}

fn optional_path(value: &str) -> Option<PathBuf> {
    (!value.is_empty() && value != "none").then(|| PathBuf::from(value))
}

fn show_path(p: &Option<PathBuf>) -> String {
    p.as_ref().map_or_else(|| "none".into(), |p| p.display().to_string())
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Sets one key. Used for config files and command-line overrides alike.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "corpus" => self.corpus = optional_path(value),
            "topics" => self.topics = optional_path(value),
            "qrels" => self.qrels = optional_path(value),
            "field.doc_id" => self.field_map.doc_id = value.into(),
            "field.topic_id" => self.field_map.topic_id = value.into(),
            "field.title" => self.field_map.title = value.into(),
            "field.abstract" => self.field_map.abstract_text = value.into(),
            "field.description" => self.field_map.description = value.into(),
            "field.claims" => self.field_map.claims = value.into(),
            "field.codes" => self.field_map.codes = value.into(),
            "skip_malformed" => self.skip_malformed = parse_bool(key, value)?,
            "mode" => {
                self.modes = if value == "both" { Mode::ALL.to_vec() } else { parse_list(key, value)? };
                self.modes.sort();
                self.modes.dedup();
            }
            "strategy" => {
                self.strategies = if value == "all" { Strategy::ALL.to_vec() } else { parse_list(key, value)? };
                self.strategies.sort_by_key(|s| s.order());
                self.strategies.dedup();
            }
            "n_select" | "select" => self.n_select = parse(key, value)?,
            "cutoff" => self.cutoff = parse(key, value)?,
            "k" => self.k = parse(key, value)?,
            "central_k" => self.central_k = parse(key, value)?,
            "sample_size" => self.sampling.target_size = parse(key, value)?,
            "docs_per_query" => self.sampling.docs_per_query = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "distortion" => {
                self.distortion = match value {
                    "none" => DistortionMode::None,
                    "random" => DistortionMode::Random,
                    _ => return Err(bad(key, value, "expected none or random")),
                }
            }
            "stats" => {
                self.stats = match value {
                    "sample" => StatsSource::Sample,
                    "full" => StatsSource::Full,
                    _ => return Err(bad(key, value, "expected sample or full")),
                }
            }
            "bm25.k1" => self.bm25.k1 = parse(key, value)?,
            "bm25.b" => self.bm25.b = parse(key, value)?,
            "query.desc_words" => self.desc_word_limit = parse(key, value)?,
            "query.max_words" => self.total_word_limit = parse(key, value)?,
            "max_topics" => self.max_topics = parse(key, value)?,
            "min_overlap" => self.merge.min_overlap = parse(key, value)?,
            "gm_min_overlap" => self.merge.gm_min_overlap = parse(key, value)?,
            "overlap_scoring" => {
                self.merge.overlap_scoring = match value {
                    "predict" => OverlapScoring::Predict,
                    "central" => OverlapScoring::Central,
                    _ => return Err(bad(key, value, "expected predict or central")),
                }
            }
            "ridge" => self.models.ridge = parse(key, value)?,
            "tree.max_depth" => self.models.tree.max_depth = parse(key, value)?,
            "tree.min_leaf" => self.models.tree.min_leaf = parse(key, value)?,
            "forest.n_trees" => self.models.forest.n_trees = parse(key, value)?,
            "forest.bootstrap" => self.models.forest.bootstrap = parse_bool(key, value)?,
            "forest.feature_frac" => {
                self.models.forest.feature_frac = if value == "auto" { None } else { Some(parse(key, value)?) }
            }
            "svr.epsilon" => self.models.svr.epsilon = parse(key, value)?,
            "svr.c" => self.models.svr.c_reg = parse(key, value)?,
            "svr.epochs" => self.models.svr.epochs = parse(key, value)?,
            "svr.step" => self.models.svr.step = parse(key, value)?,
            "mlp.hidden" => self.models.mlp.hidden = parse_list(key, value)?,
            "mlp.lr" => self.models.mlp.lr = parse(key, value)?,
            "mlp.epochs" => self.models.mlp.epochs = parse(key, value)?,
            "mlp.batch_size" => self.models.mlp.batch_size = parse(key, value)?,
            "mlp.patience" => self.models.mlp.patience = parse(key, value)?,
            "mlp.min_improvement" => self.models.mlp.min_improvement = parse(key, value)?,
            "threads" => self.threads = parse(key, value)?,
            "cache_dir" => self.cache_dir = optional_path(value),
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    /// Applies a `key = value` text. `#` starts a comment line.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Line { line: i + 1, message: "expected key = value".into() });
            };
            self.set(key.trim(), value).map_err(|e| ConfigError::Line { line: i + 1, message: e.to_string() })?;
        }
        Ok(())
    }

    /// Reads a config file. Relative input paths resolve against the
    /// file's directory.
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.corpus, &mut cfg.topics, &mut cfg.qrels, &mut cfg.cache_dir].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("n_select", self.n_select),
            ("cutoff", self.cutoff),
            ("k", self.k),
            ("central_k", self.central_k),
            ("sample_size", self.sampling.target_size),
            ("docs_per_query", self.sampling.docs_per_query),
            ("query.max_words", self.total_word_limit),
            ("min_overlap", self.merge.min_overlap),
            ("gm_min_overlap", self.merge.gm_min_overlap),
            ("forest.n_trees", self.models.forest.n_trees),
            ("tree.min_leaf", self.models.tree.min_leaf),
            ("mlp.batch_size", self.models.mlp.batch_size),
        ];
        if let Some((key, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(ConfigError::Invalid(format!("`{key}` must be at least 1")));
        }
        if self.modes.is_empty() || self.strategies.is_empty() {
            return Err(ConfigError::Invalid("at least one mode and one strategy are required".into()));
        }
        if !(self.bm25.k1 >= 0.0 && (0.0..=1.0).contains(&self.bm25.b)) {
            return Err(ConfigError::Invalid("bm25 needs k1 >= 0 and b in [0, 1]".into()));
        }
        if let Some(f) = self.models.forest.feature_frac.filter(|f| !(*f > 0.0 && *f <= 1.0)) {
            return Err(ConfigError::Invalid(format!("forest.feature_frac {f} must be in (0, 1]")));
        }
        if self.models.ridge.is_nan() || self.models.ridge < 0.0 {
            return Err(ConfigError::Invalid("ridge must be non-negative".into()));
        }
        Ok(())
    }

    /// Every effective value that can change results, as `key = value`
    /// pairs in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let m = &self.models;
        let fm = &self.field_map;
        vec![
            ("corpus", show_path(&self.corpus)),
            ("topics", show_path(&self.topics)),
            ("qrels", show_path(&self.qrels)),
            ("field.doc_id", fm.doc_id.clone()),
            ("field.topic_id", fm.topic_id.clone()),
            ("field.title", fm.title.clone()),
            ("field.abstract", fm.abstract_text.clone()),
            ("field.description", fm.description.clone()),
            ("field.claims", fm.claims.clone()),
            ("field.codes", fm.codes.clone()),
            ("skip_malformed", self.skip_malformed.to_string()),
            ("mode", join(&self.modes)),
            ("strategy", join(&self.strategies)),
            ("n_select", self.n_select.to_string()),
            ("cutoff", self.cutoff.to_string()),
            ("k", self.k.to_string()),
            ("central_k", self.central_k.to_string()),
            ("sample_size", self.sampling.target_size.to_string()),
            ("docs_per_query", self.sampling.docs_per_query.to_string()),
            ("seed", self.seed.to_string()),
            ("distortion", match self.distortion {
                DistortionMode::None => "none".into(),
                DistortionMode::Random => "random".into(),
            }),
            ("stats", match self.stats {
                StatsSource::Sample => "sample".into(),
                StatsSource::Full => "full".into(),
            }),
            ("bm25.k1", self.bm25.k1.to_string()),
            ("bm25.b", self.bm25.b.to_string()),
            ("query.desc_words", self.desc_word_limit.to_string()),
            ("query.max_words", self.total_word_limit.to_string()),
            ("max_topics", self.max_topics.to_string()),
            ("min_overlap", self.merge.min_overlap.to_string()),
            ("gm_min_overlap", self.merge.gm_min_overlap.to_string()),
            ("overlap_scoring", match self.merge.overlap_scoring {
                OverlapScoring::Predict => "predict".into(),
                OverlapScoring::Central => "central".into(),
            }),
            ("ridge", m.ridge.to_string()),
            ("tree.max_depth", m.tree.max_depth.to_string()),
            ("tree.min_leaf", m.tree.min_leaf.to_string()),
            ("forest.n_trees", m.forest.n_trees.to_string()),
            ("forest.bootstrap", m.forest.bootstrap.to_string()),
            ("forest.feature_frac", m.forest.feature_frac.map_or_else(|| "auto".into(), |f| f.to_string())),
            ("svr.epsilon", m.svr.epsilon.to_string()),
            ("svr.c", m.svr.c_reg.to_string()),
            ("svr.epochs", m.svr.epochs.to_string()),
            ("svr.step", m.svr.step.to_string()),
            ("mlp.hidden", join(&m.mlp.hidden)),
            ("mlp.lr", m.mlp.lr.to_string()),
            ("mlp.epochs", m.mlp.epochs.to_string()),
            ("mlp.batch_size", m.mlp.batch_size.to_string()),
            ("mlp.patience", m.mlp.patience.to_string()),
            ("mlp.min_improvement", m.mlp.min_improvement.to_string()),
        ]
    }
}

fn bad(key: &str, value: &str, reason: &str) -> ConfigError {
    ConfigError::BadValue { key: key.into(), value: value.into(), reason: reason.into() }
}
