use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::linear::fit_linear;
use super::{training_mse, FitReport, ModelError, Standardizer, TrainingSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvrParams {
    pub epsilon: f64,
    pub c_reg: f64,
    pub epochs: usize,
    /// Initial step size; step `t` uses `step / sqrt(t)`.
    pub step: f64,
}

impl Default for SvrParams {
    fn default() -> Self {
        Self { epsilon: 0.01, c_reg: 1.0, epochs: 500, step: 0.1 }
    }
}

/// Linear epsilon-insensitive regressor on standardized inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvr {
    pub scaler: Standardizer,
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub epsilon: f64,
}

impl LinearSvr {
    pub fn input_dim(&self) -> usize {
        self.weights.len()
    }

    fn predict_scaled(&self, z: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(z).map(|(w, v)| w * v).sum::<f64>()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.predict_scaled(&self.scaler.apply(x))
    }

    /// `0.5 |w|^2 + C * sum max(0, |y - f(x)| - epsilon)` in standardized
    /// input space.
    pub fn primal_objective(&self, ts: &TrainingSet, c_reg: f64) -> f64 {
        let reg = 0.5 * self.weights.iter().map(|w| w * w).sum::<f64>();
        let loss: f64 = ts
            .features
            .iter()
            .zip(&ts.targets)
            .map(|(x, y)| ((y - self.predict(x)).abs() - self.epsilon).max(0.0))
            .sum();
        reg + c_reg * loss
    }
}

/// Averaged stochastic subgradient descent on the primal objective, started
/// from the ridge least-squares solution. Samples are visited in a seeded
/// shuffled order each epoch; iterates of the second half of training are
/// averaged. If the average does not improve on the starting point, the
/// starting point is returned.
pub fn fit_svr(ts: &TrainingSet, params: SvrParams, ridge: f64, seed: u64) -> Result<(LinearSvr, FitReport), ModelError> {
    ts.require(2)?;
    let dim = ts.dim();
    let scaler = Standardizer::fit(&ts.features, dim);
    let z: Vec<Vec<f64>> = ts.features.iter().map(|x| scaler.apply(x)).collect();
    let scaled = TrainingSet { features: z.clone(), targets: ts.targets.clone(), layout: Vec::new() };
    let (init, _) = fit_linear(&scaled, ridge)?;

    let n = ts.len();
    let reg_weight = 1.0 / (params.c_reg * n as f64);
    let mut w = init.weights.clone();
    let mut b = init.intercept;
    let mut avg_w = alloc::vec![0.0; dim];
    let mut avg_b = 0.0;
    let mut averaged = 0usize;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = 0usize;
    let start_avg = params.epochs / 2;

    for epoch in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = params.step / libm::sqrt(t as f64);
            let r = ts.targets[i] - (b + w.iter().zip(&z[i]).map(|(a, c)| a * c).sum::<f64>());
            let outside = r.abs() > params.epsilon;
            let sign = if r > 0.0 { 1.0 } else { -1.0 };
            for (wj, zj) in w.iter_mut().zip(&z[i]) {
                let mut g = reg_weight * *wj;
                if outside {
                    g -= sign * zj;
                }
                *wj -= eta * g;
            }
            if outside {
                b += eta * sign;
            }
        }
        if !b.is_finite() || w.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::Diverged { epoch });
        }
        if epoch >= start_avg {
            averaged += 1;
            let k = averaged as f64;
            for (a, v) in avg_w.iter_mut().zip(&w) {
                *a += (v - *a) / k;
            }
            avg_b += (b - avg_b) / k;
        }
    }

    let start = LinearSvr { scaler: scaler.clone(), weights: init.weights, intercept: init.intercept, epsilon: params.epsilon };
    let trained = if averaged > 0 {
        LinearSvr { scaler, weights: avg_w, intercept: avg_b, epsilon: params.epsilon }
    } else {
        start.clone()
    };
    let improved = trained.primal_objective(ts, params.c_reg) <= start.primal_objective(ts, params.c_reg);
    let model = if improved { trained } else { start };
    let report = FitReport {
        mse: training_mse(&|x: &[f64]| model.predict(x), ts),
        iterations: params.epochs,
        converged: improved,
    };
    Ok((model, report))
}
