//! Binary logistic regression fitted with plain stochastic gradient
//! descent: fixed learning rate, seeded per-epoch shuffling, no
//! regularization.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::learn::dataset::{Dataset, Matrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogregParams {
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for LogregParams {
    fn default() -> Self {
        LogregParams { learning_rate: 0.01, epochs: 50, seed: 42 }
    }
}

/// Trained linear model; weights outside the training mask stay zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de>"))]
pub struct LinearModel<S> {
    pub weights: Vec<S>,
    pub bias: S,
    /// Full-batch mean logistic loss after each epoch.
    pub loss_trace: Vec<f64>,
    pub registry_hash: Option<String>,
}

fn sigmoid<S: Scalar>(z: S) -> S {
    if z >= S::zero() {
        S::one() / (S::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (S::one() + e)
    }
}

fn dot_active<S: Scalar>(weights: &[S], bias: S, row: &[S], active: &[usize]) -> S {
    let mut z = bias;
    for &f in active {
        z += weights[f] * row[f];
    }
    z
}

fn mean_loss<S: Scalar>(data: &Dataset<S>, weights: &[S], bias: S, active: &[usize]) -> f64 {
    let mut total = 0.0f64;
    for (i, row) in data.x().iter_rows().enumerate() {
        let p = sigmoid(dot_active(weights, bias, row, active)).as_f64().clamp(1e-12, 1.0 - 1e-12);
        let y = data.y()[i] as f64;
        total -= y * p.ln() + (1.0 - y) * (1.0 - p).ln();
    }
    total / data.n() as f64
}

/// Fit by SGD over the active features. Labels must be binary.
pub fn train_logreg_sgd<S: Scalar>(data: &Dataset<S>, params: LogregParams) -> Result<LinearModel<S>> {
    if data.n_classes() != 2 {
        return Err(CoreError::InvalidDataset(format!(
            "logistic regression needs binary labels, got {} classes",
            data.n_classes()
        )));
    }
    let active = data.active_features();
    let lr = S::of(params.learning_rate);
    let mut weights = vec![S::zero(); data.d()];
    let mut bias = S::zero();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut order: Vec<usize> = (0..data.n()).collect();
    let mut loss_trace = Vec::with_capacity(params.epochs);

    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let row = data.x().row(i);
            let p = sigmoid(dot_active(&weights, bias, row, &active));
            let g = p - S::of_usize(data.y()[i]);
            for &f in &active {
                weights[f] -= lr * g * row[f];
            }
            bias -= lr * g;
        }
        loss_trace.push(mean_loss(data, &weights, bias, &active));
    }

    if weights.iter().any(|w| !w.is_finite()) || !bias.is_finite() {
        return Err(CoreError::InvalidDataset("diverged to non-finite weights".into()));
    }
    Ok(LinearModel { weights, bias, loss_trace, registry_hash: None })
}

impl<S: Scalar> LinearModel<S> {
    /// Positive-class probability per row.
    pub fn predict_proba(&self, x: &Matrix<S>) -> Result<Vec<f64>> {
        if x.cols() != self.weights.len() {
            return Err(CoreError::LengthMismatch(self.weights.len(), x.cols()));
        }
        Ok(x.iter_rows()
            .map(|row| {
                let mut z = self.bias;
                for (w, &v) in self.weights.iter().zip(row) {
                    z += *w * v;
                }
                sigmoid(z).as_f64()
            })
            .collect())
    }
}
