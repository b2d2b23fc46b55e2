use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{FitReport, ModelError, TrainingSet};

/// Ridge strength used by default for every least-squares fit.
pub const DEFAULT_RIDGE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn input_dim(&self) -> usize {
        self.weights.len()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }

    /// `sum (y - w.x - b)^2 + ridge * |w|^2`
    pub fn objective(&self, ts: &TrainingSet, ridge: f64) -> f64 {
        let sse: f64 = ts
            .features
            .iter()
            .zip(&ts.targets)
            .map(|(x, y)| {
                let r = y - self.predict(x);
                r * r
            })
            .sum();
        sse + ridge * self.weights.iter().map(|w| w * w).sum::<f64>()
    }
}

/// Solves `a x = b` in place by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>, ModelError> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap_or(core::cmp::Ordering::Equal))
            .unwrap();
        if a[pivot][col].abs() < 1e-300 {
            return Err(ModelError::Singular);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let (done, rest) = a.split_at_mut(col + 1);
        let pivot_row = &done[col];
        for (offset, r) in rest.iter_mut().enumerate() {
            let f = r[col] / pivot_row[col];
            if f == 0.0 {
                continue;
            }
            for (v, p) in r[col..].iter_mut().zip(&pivot_row[col..]) {
                *v -= f * p;
            }
            b[col + 1 + offset] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Ok(x)
}

/// Closed-form ridge regression with an unpenalized intercept.
///
/// The system is centered and column-scaled before solving; the minimizer is
/// that of the unscaled objective `sum (y - w.x - b)^2 + ridge * |w|^2`.
pub fn fit_linear(ts: &TrainingSet, ridge: f64) -> Result<(LinearModel, FitReport), ModelError> {
    ts.require(2)?;
    let n = ts.len() as f64;
    let d = ts.dim();
    let x_mean: Vec<f64> = (0..d).map(|j| ts.features.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let y_mean = ts.targets.iter().sum::<f64>() / n;
    let scale: Vec<f64> = (0..d)
        .map(|j| {
            let ss: f64 = ts.features.iter().map(|r| (r[j] - x_mean[j]) * (r[j] - x_mean[j])).sum();
            let s = libm::sqrt(ss / n);
            if s > 1e-12 {
                s
            } else {
                1.0
            }
        })
        .collect();

    let z: Vec<Vec<f64>> =
        ts.features.iter().map(|r| (0..d).map(|j| (r[j] - x_mean[j]) / scale[j]).collect()).collect();
    let mut a = vec![vec![0.0; d]; d];
    let mut rhs = vec![0.0; d];
    for (row, y) in z.iter().zip(&ts.targets) {
        let yc = y - y_mean;
        for i in 0..d {
            rhs[i] += row[i] * yc;
            for (cell, v) in a[i].iter_mut().zip(row) {
                *cell += row[i] * v;
            }
        }
    }
    for (i, s) in scale.iter().enumerate() {
        a[i][i] += ridge / (s * s);
    }
    let v = solve(a, rhs)?;
    let weights: Vec<f64> = v.iter().zip(&scale).map(|(v, s)| v / s).collect();
    let intercept = y_mean - weights.iter().zip(&x_mean).map(|(w, m)| w * m).sum::<f64>();
    if !intercept.is_finite() || weights.iter().any(|w| !w.is_finite()) {
        return Err(ModelError::Singular);
    }
    let model = LinearModel { weights, intercept };
    let report = FitReport::closed_form(&|x: &[f64]| model.predict(x), ts);
    Ok((model, report))
}

/// Appends elementwise powers: degree 2 gives `[x, x^2]`, degree 3 gives
/// `[x, x^2, x^3]`. No cross terms.
pub fn expand_poly(x: &[f64], degree: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len() * degree as usize);
    for p in 1..=degree as i32 {
        out.extend(x.iter().map(|v| libm::pow(*v, f64::from(p))));
    }
    out
}

/// Linear model on polynomially expanded inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyModel {
    pub degree: u32,
    pub linear: LinearModel,
}

impl PolyModel {
    pub fn input_dim(&self) -> usize {
        self.linear.input_dim() / self.degree as usize
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.linear.predict(&expand_poly(x, self.degree))
    }
}

pub fn fit_poly(ts: &TrainingSet, degree: u32, ridge: f64) -> Result<(PolyModel, FitReport), ModelError> {
    if !(2..=3).contains(&degree) {
        return Err(ModelError::BadDegree(degree));
    }
    ts.require(2)?;
    let expanded = TrainingSet {
        features: ts.features.iter().map(|x| expand_poly(x, degree)).collect(),
        targets: ts.targets.clone(),
        layout: ts.layout.clone(),
    };
    let (linear, _) = fit_linear(&expanded, ridge)?;
    let model = PolyModel { degree, linear };
    let report = FitReport::closed_form(&|x: &[f64]| model.predict(x), ts);
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ts(xs: &[&[f64]], ys: &[f64]) -> TrainingSet {
        TrainingSet::new(xs.iter().map(|x| x.to_vec()).collect(), ys.to_vec()).unwrap()
    }

    #[test]
    fn exact_line() {
        let (m, r) = fit_linear(&ts(&[&[0.0], &[1.0]], &[1.0, 3.0]), DEFAULT_RIDGE).unwrap();
        assert!((m.weights[0] - 2.0).abs() < 1e-5);
        assert!((m.intercept - 1.0).abs() < 1e-5);
        assert!(r.mse < 1e-10);
        assert!((m.predict(&[3.0]) - 7.0).abs() < 1e-4);
    }

    #[test]
    fn predict_by_hand() {
        let m = LinearModel { weights: vec![2.0], intercept: 1.0 };
        assert_eq!(m.predict(&[3.0]), 7.0);
    }

    #[test]
    fn constant_targets() {
        let (m, _) = fit_linear(&ts(&[&[0.0], &[1.0], &[5.0]], &[4.0, 4.0, 4.0]), DEFAULT_RIDGE).unwrap();
        assert!(m.weights[0].abs() < 1e-12);
        assert!((m.intercept - 4.0).abs() < 1e-12);
    }

    #[test]
    fn duplicated_columns_stay_finite() {
        let data = ts(&[&[1.0, 1.0], &[2.0, 2.0], &[3.0, 3.0]], &[2.0, 4.0, 6.0]);
        let (m, _) = fit_linear(&data, DEFAULT_RIDGE).unwrap();
        assert!(m.weights.iter().all(|w| w.is_finite()));
        assert!((m.weights[0] + m.weights[1] - 2.0).abs() < 1e-5);
        // more columns than points
        let wide = ts(&[&[1.0, 0.0, 3.0, 0.0], &[0.0, 2.0, 0.0, 0.0]], &[1.0, 2.0]);
        let (m, _) = fit_linear(&wide, DEFAULT_RIDGE).unwrap();
        assert!(m.weights.iter().all(|w| w.is_finite()));
        assert_eq!(m.weights[3], 0.0);
    }

    #[test]
    fn too_few_points() {
        assert_eq!(
            fit_linear(&ts(&[&[1.0]], &[1.0]), DEFAULT_RIDGE),
            Err(ModelError::TooFewPoints { needed: 2, got: 1 })
        );
    }

    #[test]
    fn planted_weights_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dim in 1..6 {
            let w: Vec<f64> = (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect();
            let b = rng.random_range(-2.0..2.0);
            let xs: Vec<Vec<f64>> = (0..40).map(|_| (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect()).collect();
            let ys = xs.iter().map(|x| b + x.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>()).collect();
            let (m, _) = fit_linear(&TrainingSet::new(xs, ys).unwrap(), DEFAULT_RIDGE).unwrap();
            for (got, want) in m.weights.iter().zip(&w) {
                assert!((got - want).abs() < 1e-5);
            }
            assert!((m.intercept - b).abs() < 1e-5);
        }
    }

    #[test]
    fn poly_expansion() {
        assert_eq!(expand_poly(&[2.0], 2), [2.0, 4.0]);
        assert_eq!(expand_poly(&[2.0], 3), [2.0, 4.0, 8.0]);
        assert_eq!(expand_poly(&[0.5, 3.0], 2), [0.5, 3.0, 0.25, 9.0]);
    }

    #[test]
    fn poly_fits_quadratic() {
        let xs: Vec<Vec<f64>> = (0..10).map(|i| vec![f64::from(i) / 3.0]).collect();
        let ys = xs.iter().map(|x| 1.0 - x[0] + 0.5 * x[0] * x[0]).collect();
        let (m, r) = fit_poly(&TrainingSet::new(xs, ys).unwrap(), 2, DEFAULT_RIDGE).unwrap();
        assert!(r.mse < 1e-9);
        assert_eq!(m.input_dim(), 1);
        assert!((m.predict(&[4.0]) - 5.0).abs() < 1e-4);
        assert_eq!(fit_poly(&ts(&[&[0.0], &[1.0]], &[0.0, 1.0]), 4, 0.0), Err(ModelError::BadDegree(4)));
    }

    proptest! {
        #[test]
        fn residual_optimality(rows in prop::collection::vec((prop::collection::vec(-10.0f64..10.0, 2), -10.0f64..10.0), 3..25)) {
            let (xs, ys): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
            let data = TrainingSet::new(xs, ys).unwrap();
            let (m, _) = fit_linear(&data, DEFAULT_RIDGE).unwrap();
            let base = m.objective(&data, DEFAULT_RIDGE);
            for coord in 0..=m.weights.len() {
                for delta in [-1e-3, 1e-3] {
                    let mut p = m.clone();
                    if coord == m.weights.len() { p.intercept += delta } else { p.weights[coord] += delta }
                    prop_assert!(p.objective(&data, DEFAULT_RIDGE) >= base - 1e-9 * (1.0 + base));
                }
            }
        }
    }
}
