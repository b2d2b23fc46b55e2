use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{grow_tree, RegressionTree, TreeParams};
use super::{ModelError, TrainingSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub bootstrap: bool,
    /// Fraction of features tried per split. `None` uses every feature for
    /// one-dimensional inputs and `floor(sqrt(d))` features otherwise.
    pub feature_frac: Option<f64>,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self { n_trees: 100, bootstrap: true, feature_frac: None }
    }
}

impl ForestParams {
    pub fn max_features(&self, dim: usize) -> usize {
        let m = match self.feature_frac {
            None if dim <= 1 => dim,
            None => libm::floor(libm::sqrt(dim as f64)) as usize,
            Some(f) => libm::ceil(f * dim as f64) as usize,
        };
        m.clamp(1, dim.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<RegressionTree>,
}

impl RandomForest {
    pub fn input_dim(&self) -> usize {
        self.trees.first().map_or(0, RegressionTree::input_dim)
    }

    /// Mean of the tree predictions, kept within their range against
    /// rounding.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let (mut sum, mut lo, mut hi) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
        for t in &self.trees {
            let p = t.predict(x);
            sum += p;
            lo = lo.min(p);
            hi = hi.max(p);
        }
        (sum / self.trees.len() as f64).clamp(lo, hi)
    }
}

/// Bagged CART ensemble with per-split feature subsampling.
pub fn fit_forest(
    ts: &TrainingSet,
    tree: TreeParams,
    params: ForestParams,
    seed: u64,
) -> Result<RandomForest, ModelError> {
    ts.require(1)?;
    let n = ts.len();
    let max_features = params.max_features(ts.dim());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trees = (0..params.n_trees.max(1))
        .map(|_| {
            let tree_seed = rng.next_u64();
            let rows: Vec<usize> = if params.bootstrap {
                let mut r = ChaCha8Rng::seed_from_u64(tree_seed ^ 0x5bd1_e995);
                let mut rows: Vec<usize> = (0..n).map(|_| r.random_range(0..n)).collect();
                rows.sort_unstable();
                rows
            } else {
                (0..n).collect()
            };
            grow_tree(ts, &rows, tree, max_features, tree_seed)
        })
        .collect();
    Ok(RandomForest { trees })
}
