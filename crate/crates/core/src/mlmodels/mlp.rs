use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{training_mse, FitReport, ModelError, Standardizer, TrainingSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub hidden: Vec<usize>,
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Stop after this many epochs without an improvement of at least
    /// `min_improvement` in training MSE.
    pub patience: usize,
    pub min_improvement: f64,
}

impl Default for MlpParams {
    fn default() -> Self {
        Self { hidden: vec![632, 300, 150, 50], lr: 0.01, epochs: 200, batch_size: 32, patience: 20, min_improvement: 1e-7 }
    }
}

/// Adam optimizer state over a flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    t: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub fn new(n_params: usize, lr: f64) -> Self {
        Self { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8, t: 0, m: vec![0.0; n_params], v: vec![0.0; n_params] }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        self.t += 1;
        let bc1 = 1.0 - libm::pow(self.beta1, self.t as f64);
        let bc2 = 1.0 - libm::pow(self.beta2, self.t as f64);
        for (((p, g), m), v) in params.iter_mut().zip(grads).zip(&mut self.m).zip(&mut self.v) {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *p -= self.lr * m_hat / (libm::sqrt(v_hat) + self.eps);
        }
    }
}

/// Fully connected ReLU network with a linear scalar output.
///
/// Parameters live in one flat vector: for each layer, an
/// `inputs x outputs` row-major weight block followed by the biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub sizes: Vec<usize>,
    pub params: Vec<f64>,
}

impl Network {
    /// He-uniform weights, zero biases.
    pub fn new(input_dim: usize, hidden: &[usize], rng: &mut impl Rng) -> Self {
        let mut sizes = Vec::with_capacity(hidden.len() + 2);
        sizes.push(input_dim);
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        let mut params = Vec::new();
        for w in sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = libm::sqrt(6.0 / fan_in.max(1) as f64);
            params.extend((0..fan_in * fan_out).map(|_| rng.random_range(-limit..limit)));
            params.extend(core::iter::repeat_n(0.0, fan_out));
        }
        Self { sizes, params }
    }

    /// `(inputs, outputs)` of each weight matrix.
    pub fn layer_shapes(&self) -> Vec<(usize, usize)> {
        self.sizes.windows(2).map(|w| (w[0], w[1])).collect()
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    fn offsets(&self) -> Vec<(usize, usize)> {
        let mut at = 0;
        self.layer_shapes()
            .into_iter()
            .map(|(i, o)| {
                let w = at;
                at += i * o + o;
                (w, w + i * o)
            })
            .collect()
    }

    /// Pre-activations of every layer for one input.
    fn forward_all(&self, x: &[f64], offsets: &[(usize, usize)]) -> Vec<Vec<f64>> {
        let shapes = self.layer_shapes();
        let mut pre: Vec<Vec<f64>> = Vec::with_capacity(shapes.len());
        for (l, &(inputs, outputs)) in shapes.iter().enumerate() {
            let (w_off, b_off) = offsets[l];
            let mut out = self.params[b_off..b_off + outputs].to_vec();
            for i in 0..inputs {
                let a = if l == 0 { x[i] } else { pre[l - 1][i].max(0.0) };
                if a == 0.0 {
                    continue;
                }
                let row = &self.params[w_off + i * outputs..w_off + (i + 1) * outputs];
                for (o, w) in out.iter_mut().zip(row) {
                    *o += a * w;
                }
            }
            pre.push(out);
        }
        pre
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        let offsets = self.offsets();
        self.forward_all(x, &offsets).last().unwrap()[0]
    }

    /// Mean squared error over the given rows and its gradient with respect
    /// to the flat parameter vector.
    pub fn loss_and_gradient(&self, xs: &[&[f64]], ys: &[f64]) -> (f64, Vec<f64>) {
        let offsets = self.offsets();
        let shapes = self.layer_shapes();
        let mut grad = vec![0.0; self.params.len()];
        let scale = 1.0 / xs.len() as f64;
        let mut loss = 0.0;
        for (x, y) in xs.iter().zip(ys) {
            let pre = self.forward_all(x, &offsets);
            let err = pre.last().unwrap()[0] - y;
            loss += err * err * scale;
            let mut delta = vec![2.0 * err * scale];
            for l in (0..shapes.len()).rev() {
                let (inputs, outputs) = shapes[l];
                let (w_off, b_off) = offsets[l];
                for (g, d) in grad[b_off..b_off + outputs].iter_mut().zip(&delta) {
                    *g += d;
                }
                let mut prev = vec![0.0; if l > 0 { inputs } else { 0 }];
                for i in 0..inputs {
                    let a = if l == 0 { x[i] } else { pre[l - 1][i].max(0.0) };
                    let w_row = w_off + i * outputs;
                    if a != 0.0 {
                        for (g, d) in grad[w_row..w_row + outputs].iter_mut().zip(&delta) {
                            *g += a * d;
                        }
                    }
                    if l > 0 && pre[l - 1][i] > 0.0 {
                        prev[i] = self.params[w_row..w_row + outputs].iter().zip(&delta).map(|(w, d)| w * d).sum();
                    }
                }
                delta = prev;
            }
        }
        (loss, grad)
    }
}

/// Network plus the input and target scaling fitted on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub scaler: Standardizer,
    pub y_mean: f64,
    pub y_scale: f64,
    pub net: Network,
}

impl Mlp {
    pub fn input_dim(&self) -> usize {
        self.net.input_dim()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.y_mean + self.y_scale * self.net.forward(&self.scaler.apply(x))
    }
}

/// Minibatch Adam on mean squared error, with seeded initialization and
/// shuffling. Inputs and targets are standardized internally.
pub fn fit_mlp(ts: &TrainingSet, params: &MlpParams, seed: u64) -> Result<(Mlp, FitReport), ModelError> {
    ts.require(1)?;
    if params.hidden.is_empty() || params.hidden.contains(&0) {
        return Err(ModelError::BadLayout);
    }
    let dim = ts.dim();
    let scaler = Standardizer::fit(&ts.features, dim);
    let y_scaler = Standardizer::fit(&ts.targets.iter().map(|&y| vec![y]).collect::<Vec<_>>(), 1);
    let (y_mean, y_scale) = (y_scaler.mean[0], y_scaler.scale[0]);
    let z: Vec<Vec<f64>> = ts.features.iter().map(|x| scaler.apply(x)).collect();
    let t: Vec<f64> = ts.targets.iter().map(|y| (y - y_mean) / y_scale).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = Network::new(dim, &params.hidden, &mut rng);
    let mut adam = Adam::new(net.params.len(), params.lr);
    let mut order: Vec<usize> = (0..ts.len()).collect();
    let batch = params.batch_size.max(1);
    let all_rows: Vec<&[f64]> = z.iter().map(Vec::as_slice).collect();

    let mut best = f64::INFINITY;
    let mut stale = 0;
    let mut epochs_run = 0;
    let mut converged = false;
    for epoch in 0..params.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch) {
            let xs: Vec<&[f64]> = chunk.iter().map(|&i| z[i].as_slice()).collect();
            let ys: Vec<f64> = chunk.iter().map(|&i| t[i]).collect();
            let (loss, grad) = net.loss_and_gradient(&xs, &ys);
            if !loss.is_finite() {
                return Err(ModelError::Diverged { epoch });
            }
            adam.step(&mut net.params, &grad);
        }
        epochs_run = epoch + 1;
        let mse = all_rows
            .iter()
            .zip(&t)
            .map(|(x, y)| {
                let d = net.forward(x) - y;
                d * d
            })
            .sum::<f64>()
            / ts.len() as f64;
        if !mse.is_finite() {
            return Err(ModelError::Diverged { epoch });
        }
        if best - mse >= params.min_improvement {
            stale = 0;
        } else {
            stale += 1;
        }
        best = best.min(mse);
        if stale >= params.patience {
            converged = true;
            break;
        }
    }
    let model = Mlp { scaler, y_mean, y_scale, net };
    let report = FitReport { mse: training_mse(&|x: &[f64]| model.predict(x), ts), iterations: epochs_run, converged };
    Ok((model, report))
}
