//! Regressors used to map local scores onto globally comparable scores.
//!
//! All of them are written from scratch against [`TrainingSet`]. Fits are
//! deterministic for a given seed; fitted models are immutable and
//! [`MergeModel::predict`] is pure.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod forest;
mod linear;
mod mlp;
mod svr;
mod tree;

pub use forest::{fit_forest, ForestParams, RandomForest};
pub use linear::{expand_poly, fit_linear, fit_poly, LinearModel, PolyModel, DEFAULT_RIDGE};
pub use mlp::{fit_mlp, Adam, Mlp, MlpParams, Network};
pub use svr::{fit_svr, LinearSvr, SvrParams};
pub use tree::{fit_tree, Node, RegressionTree, TreeParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("need at least {needed} training points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("expected input of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("training set has {features} feature rows but {targets} targets")]
    LengthMismatch { features: usize, targets: usize },
    #[error("training data contains non-finite values")]
    NonFinite,
    #[error("linear system is singular")]
    Singular,
    #[error("training loss became non-finite at epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("hidden layer layout must be non-empty with positive widths")]
    BadLayout,
    #[error("unsupported polynomial degree {0}")]
    BadDegree(u32),
    #[error("unknown model kind `{0}`")]
    UnknownKind(String),
}

/// Feature rows and centralized-score targets.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingSet {
    pub features: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    /// Source order behind the feature positions of global-model vectors;
    /// empty for single-source training sets.
    pub layout: Vec<String>,
}

impl TrainingSet {
    pub fn new(features: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self, ModelError> {
        Self::with_layout(features, targets, Vec::new())
    }

    pub fn with_layout(features: Vec<Vec<f64>>, targets: Vec<f64>, layout: Vec<String>) -> Result<Self, ModelError> {
        let ts = Self { features, targets, layout };
        ts.check()?;
        Ok(ts)
    }

    /// Verifies equal lengths, one shared dimension and finiteness.
    pub fn check(&self) -> Result<(), ModelError> {
        if self.features.len() != self.targets.len() {
            return Err(ModelError::LengthMismatch { features: self.features.len(), targets: self.targets.len() });
        }
        let dim = self.dim();
        for row in &self.features {
            if row.len() != dim {
                return Err(ModelError::DimensionMismatch { expected: dim, got: row.len() });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(ModelError::NonFinite);
            }
        }
        if self.targets.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    fn require(&self, needed: usize) -> Result<(), ModelError> {
        self.check()?;
        if self.len() < needed {
            return Err(ModelError::TooFewPoints { needed, got: self.len() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// Mean squared training error in target units.
    pub mse: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl FitReport {
    fn closed_form(model: &impl Fn(&[f64]) -> f64, ts: &TrainingSet) -> Self {
        Self { mse: training_mse(model, ts), iterations: 1, converged: true }
    }
}

pub(crate) fn training_mse(model: &impl Fn(&[f64]) -> f64, ts: &TrainingSet) -> f64 {
    if ts.is_empty() {
        return 0.0;
    }
    ts.features
        .iter()
        .zip(&ts.targets)
        .map(|(x, y)| {
            let d = model(x) - y;
            d * d
        })
        .sum::<f64>()
        / ts.len() as f64
}

/// Per-feature z-scoring fitted on training rows. Constant features get a
/// scale of 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>], dim: usize) -> Self {
        let n = rows.len().max(1) as f64;
        let mut mean = alloc::vec![0.0; dim];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut scale = alloc::vec![0.0; dim];
        for r in rows {
            for ((s, v), m) in scale.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        for s in &mut scale {
            let sd = libm::sqrt(*s / n);
            *s = if sd > 1e-12 { sd } else { 1.0 };
        }
        Self { mean, scale }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.mean).zip(&self.scale).map(|((v, m), s)| (v - m) / s).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Linear,
    Poly2,
    Poly3,
    Tree,
    Forest,
    Svr,
    Mlp,
}

impl ModelKind {
    pub const ALL: [ModelKind; 7] =
        [Self::Linear, Self::Poly2, Self::Poly3, Self::Tree, Self::Forest, Self::Svr, Self::Mlp];

    pub fn name(self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Poly2 => "poly2",
            Self::Poly3 => "poly3",
            Self::Tree => "tree",
            Self::Forest => "forest",
            Self::Svr => "svr",
            Self::Mlp => "mlp",
        }
    }

    /// Smallest training set the fit accepts.
    pub fn min_points(self) -> usize {
        match self {
            Self::Linear | Self::Poly2 | Self::Poly3 | Self::Svr => 2,
            Self::Tree | Self::Forest | Self::Mlp => 1,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| ModelError::UnknownKind(s.into()))
    }
}

/// Hyperparameters of every model kind; only the relevant part is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub ridge: f64,
    pub tree: TreeParams,
    pub forest: ForestParams,
    pub svr: SvrParams,
    pub mlp: MlpParams,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            ridge: DEFAULT_RIDGE,
            tree: TreeParams::default(),
            forest: ForestParams::default(),
            svr: SvrParams::default(),
            mlp: MlpParams::default(),
        }
    }
}

/// A fitted regressor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MergeModel {
    Linear(LinearModel),
    Poly(PolyModel),
    Tree(RegressionTree),
    Forest(RandomForest),
    Svr(LinearSvr),
    Mlp(Mlp),
}

impl MergeModel {
    pub fn input_dim(&self) -> usize {
        match self {
            Self::Linear(m) => m.input_dim(),
            Self::Poly(m) => m.input_dim(),
            Self::Tree(m) => m.input_dim(),
            Self::Forest(m) => m.input_dim(),
            Self::Svr(m) => m.input_dim(),
            Self::Mlp(m) => m.input_dim(),
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64, ModelError> {
        if x.len() != self.input_dim() {
            return Err(ModelError::DimensionMismatch { expected: self.input_dim(), got: x.len() });
        }
        Ok(self.predict_unchecked(x))
    }

    fn predict_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            Self::Linear(m) => m.predict(x),
            Self::Poly(m) => m.predict(x),
            Self::Tree(m) => m.predict(x),
            Self::Forest(m) => m.predict(x),
            Self::Svr(m) => m.predict(x),
            Self::Mlp(m) => m.predict(x),
        }
    }
}

/// Fits the requested kind.
pub fn fit_model(
    kind: ModelKind,
    params: &ModelParams,
    ts: &TrainingSet,
    seed: u64,
) -> Result<(MergeModel, FitReport), ModelError> {
    Ok(match kind {
        ModelKind::Linear => {
            let (m, r) = fit_linear(ts, params.ridge)?;
            (MergeModel::Linear(m), r)
        }
        ModelKind::Poly2 | ModelKind::Poly3 => {
            let degree = if kind == ModelKind::Poly2 { 2 } else { 3 };
            let (m, r) = fit_poly(ts, degree, params.ridge)?;
            (MergeModel::Poly(m), r)
        }
        ModelKind::Tree => {
            let m = fit_tree(ts, params.tree, seed)?;
            let r = FitReport::closed_form(&|x: &[f64]| m.predict(x), ts);
            (MergeModel::Tree(m), r)
        }
        ModelKind::Forest => {
            let m = fit_forest(ts, params.tree, params.forest, seed)?;
            let r = FitReport::closed_form(&|x: &[f64]| m.predict(x), ts);
            (MergeModel::Forest(m), r)
        }
        ModelKind::Svr => {
            let (m, r) = fit_svr(ts, params.svr, params.ridge, seed)?;
            (MergeModel::Svr(m), r)
        }
        ModelKind::Mlp => {
            let (m, r) = fit_mlp(ts, &params.mlp, seed)?;
            (MergeModel::Mlp(m), r)
        }
    })
}
