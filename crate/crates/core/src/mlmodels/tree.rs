use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ModelError, TrainingSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self { max_depth: 8, min_leaf: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf { value: f64, samples: usize },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

/// CART regression tree stored as a node arena rooted at index 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
    pub input_dim: usize,
}

impl RegressionTree {
    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    /// Index of the leaf reached by `x`.
    pub fn leaf_of(&self, x: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { .. } => return at,
                Node::Split { feature, threshold, left, right } => {
                    at = if x[feature] < threshold { left } else { right };
                }
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        match self.nodes[self.leaf_of(x)] {
            Node::Leaf { value, .. } => value,
            Node::Split { .. } => unreachable!("leaf_of stops at leaves"),
        }
    }

    pub fn num_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    params: TreeParams,
    max_features: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    sse: f64,
}

fn sse_of(sum: f64, sum_sq: f64, n: f64) -> f64 {
    (sum_sq - sum * sum / n).max(0.0)
}

impl Builder<'_> {
    fn leaf(&mut self, rows: &[usize]) -> usize {
        let first = self.y[rows[0]];
        let value = if rows.iter().all(|&r| self.y[r] == first) {
            first
        } else {
            rows.iter().map(|&r| self.y[r]).sum::<f64>() / rows.len() as f64
        };
        self.nodes.push(Node::Leaf { value, samples: rows.len() });
        self.nodes.len() - 1
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let dim = self.x[0].len();
        if self.max_features >= dim {
            return (0..dim).collect();
        }
        let mut picked = sample(&mut self.rng, dim, self.max_features).into_vec();
        picked.sort_unstable();
        picked
    }

    fn best_split(&mut self, rows: &[usize], parent_sse: f64) -> Option<BestSplit> {
        let min_leaf = self.params.min_leaf.max(1);
        let n = rows.len();
        let total: f64 = rows.iter().map(|&r| self.y[r]).sum();
        let total_sq: f64 = rows.iter().map(|&r| self.y[r] * self.y[r]).sum();
        let mut best: Option<BestSplit> = None;
        let mut order = rows.to_vec();
        for feature in self.candidate_features() {
            order.sort_by(|&a, &b| {
                self.x[a][feature].partial_cmp(&self.x[b][feature]).unwrap_or(core::cmp::Ordering::Equal).then(a.cmp(&b))
            });
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for i in 0..n - 1 {
                let y = self.y[order[i]];
                sum += y;
                sum_sq += y * y;
                let left_n = i + 1;
                let (lo, hi) = (self.x[order[i]][feature], self.x[order[i + 1]][feature]);
                if left_n < min_leaf || n - left_n < min_leaf || lo >= hi {
                    continue;
                }
                let sse = sse_of(sum, sum_sq, left_n as f64) + sse_of(total - sum, total_sq - sum_sq, (n - left_n) as f64);
                let better = match &best {
                    None => true,
                    Some(b) => sse < b.sse - 1e-12 * (1.0 + b.sse.abs()),
                };
                if better {
                    let mid = lo + (hi - lo) / 2.0;
                    let threshold = if mid > lo { mid } else { hi };
                    best = Some(BestSplit { feature, threshold, sse });
                }
            }
        }
        best.filter(|b| b.sse < parent_sse - 1e-12 * (1.0 + parent_sse.abs()))
    }

    fn grow(&mut self, rows: &[usize], depth: usize) -> usize {
        let n = rows.len() as f64;
        let sum: f64 = rows.iter().map(|&r| self.y[r]).sum();
        let sum_sq: f64 = rows.iter().map(|&r| self.y[r] * self.y[r]).sum();
        let parent_sse = sse_of(sum, sum_sq, n);
        let all_equal = rows.iter().all(|&r| self.y[r] == self.y[rows[0]]);
        if depth >= self.params.max_depth || rows.len() < 2 * self.params.min_leaf.max(1) || all_equal {
            return self.leaf(rows);
        }
        let Some(split) = self.best_split(rows, parent_sse) else {
            return self.leaf(rows);
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&r| self.x[r][split.feature] < split.threshold);
        let at = self.nodes.len();
        self.nodes.push(Node::Split { feature: split.feature, threshold: split.threshold, left: 0, right: 0 });
        let left = self.grow(&left_rows, depth + 1);
        let right = self.grow(&right_rows, depth + 1);
        self.nodes[at] = Node::Split { feature: split.feature, threshold: split.threshold, left, right };
        at
    }
}

/// Grows a tree on the given row multiset, sampling `max_features`
/// candidate features per split.
pub(crate) fn grow_tree(
    ts: &TrainingSet,
    rows: &[usize],
    params: TreeParams,
    max_features: usize,
    seed: u64,
) -> RegressionTree {
    let mut builder = Builder {
        x: &ts.features,
        y: &ts.targets,
        params,
        max_features: max_features.max(1),
        rng: ChaCha8Rng::seed_from_u64(seed),
        nodes: Vec::new(),
    };
    builder.grow(rows, 0);
    RegressionTree { nodes: builder.nodes, input_dim: ts.dim() }
}

/// Greedy CART fit minimizing the summed squared error of the two children.
///
/// Ties keep the lowest feature index, then the lowest threshold. With all
/// features considered the result does not depend on `seed`.
pub fn fit_tree(ts: &TrainingSet, params: TreeParams, seed: u64) -> Result<RegressionTree, ModelError> {
    ts.require(1)?;
    let rows: Vec<usize> = (0..ts.len()).collect();
    Ok(grow_tree(ts, &rows, params, ts.dim(), seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;
    use alloc::vec;
    use proptest::prelude::*;

    fn ts(xs: &[f64], ys: &[f64]) -> TrainingSet {
        TrainingSet::new(xs.iter().map(|&x| vec![x]).collect(), ys.to_vec()).unwrap()
    }

    #[test]
    fn two_point_split() {
        let t = fit_tree(&ts(&[0.0, 1.0], &[0.0, 1.0]), TreeParams { max_depth: 1, min_leaf: 1 }, 0).unwrap();
        assert_eq!(t.predict(&[0.0]), 0.0);
        assert_eq!(t.predict(&[1.0]), 1.0);
        match t.nodes[0] {
            Node::Split { threshold, .. } => assert_eq!(threshold, 0.5),
            _ => panic!("expected a split"),
        }
    }

    #[test]
    fn constant_targets_single_leaf() {
        let t = fit_tree(&ts(&[0.0, 1.0, 2.0, 3.0, 4.0], &[0.42; 5]), TreeParams::default(), 0).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict(&[100.0]), 0.42);
    }

    #[test]
    fn depth_zero_predicts_mean() {
        let t = fit_tree(&ts(&[0.0, 1.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 6.0]), TreeParams { max_depth: 0, min_leaf: 1 }, 0)
            .unwrap();
        assert_eq!(t.predict(&[-5.0]), 3.0);
        assert_eq!(t.predict(&[9.0]), 3.0);
    }

    #[test]
    fn respects_min_leaf() {
        let t = fit_tree(&ts(&[0.0, 1.0, 2.0], &[0.0, 0.0, 9.0]), TreeParams { max_depth: 5, min_leaf: 2 }, 0).unwrap();
        assert_eq!(t.nodes.len(), 1);
    }

    #[test]
    fn tie_prefers_lowest_feature() {
        // both features separate the targets identically
        let data = TrainingSet::new(vec![vec![0.0, 10.0], vec![1.0, 11.0]], vec![0.0, 1.0]).unwrap();
        let t = fit_tree(&data, TreeParams { max_depth: 1, min_leaf: 1 }, 0).unwrap();
        assert!(matches!(t.nodes[0], Node::Split { feature: 0, .. }));
    }

    proptest! {
        #[test]
        fn leaves_predict_their_training_mean(
            rows in prop::collection::vec((prop::collection::vec(-5.0f64..5.0, 2), -3.0f64..3.0), 1..60),
            depth in 0usize..6, min_leaf in 1usize..4,
        ) {
            let (xs, ys): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
            let data = TrainingSet::new(xs, ys).unwrap();
            let t = fit_tree(&data, TreeParams { max_depth: depth, min_leaf }, 3).unwrap();
            prop_assert!(t.depth() <= depth);
            let mut groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
            for (x, y) in data.features.iter().zip(&data.targets) {
                groups.entry(t.leaf_of(x)).or_default().push(*y);
            }
            for (leaf, ys) in groups {
                let mean = ys.iter().sum::<f64>() / ys.len() as f64;
                let Node::Leaf { value, samples } = t.nodes[leaf] else { unreachable!() };
                prop_assert_eq!(samples, ys.len());
                prop_assert!((value - mean).abs() <= 1e-12 * (1.0 + mean.abs()));
                prop_assert!(samples >= min_leaf || t.nodes.len() == 1);
            }
        }
    }
}
