//! Random forest: bootstrapped CART trees with counter-based per-tree
//! seeding, normalized impurity importances and mean-leaf-frequency
//! probabilities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::learn::dataset::{Dataset, Matrix};
use crate::learn::tree::DecisionTree;
use crate::scalar::Scalar;

/// Forest hyperparameters. Defaults: 100 trees, seed 42, sqrt(d) features
/// per split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub seed: u64,
    /// Features considered per split; `None` means floor(sqrt(active)).
    pub mtry: Option<usize>,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { n_estimators: 100, seed: 42, mtry: None }
    }
}

/// Counter-based per-tree seed, so tree training order never matters.
fn tree_seed(seed: u64, index: u64) -> u64 {
    crate::seed::mix(seed, index)
}

/// Trained random forest. Immutable; prediction is pure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de>"))]
pub struct ForestModel<S> {
    trees: Vec<DecisionTree<S>>,
    pub n_features: usize,
    pub n_classes: usize,
    pub params: ForestParams,
    /// Mean decrease in impurity per original column; sums to 1, or is all
    /// zero when no tree ever split (single-class data).
    pub importances: Vec<f64>,
    /// Hash of the feature registry the training matrix was extracted with.
    pub registry_hash: Option<String>,
}

/// Train a forest on the dataset's active features.
pub fn train_forest<S: Scalar>(data: &Dataset<S>, params: ForestParams) -> Result<ForestModel<S>> {
    if data.n() < 2 {
        return Err(CoreError::InvalidDataset(format!("{} samples cannot be split", data.n())));
    }
    if params.n_estimators == 0 {
        return Err(CoreError::InvalidParam("zero estimators".into()));
    }
    let active = data.active_features();
    let mtry = params
        .mtry
        .unwrap_or_else(|| (active.len() as f64).sqrt().floor() as usize)
        .clamp(1, active.len());

    let n = data.n();
    let d = data.d();
    let per_tree: Vec<(DecisionTree<S>, Vec<f64>)> = (0..params.n_estimators)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(tree_seed(params.seed, t as u64));
            let bootstrap: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let mut imp = vec![0.0f64; d];
            let tree = DecisionTree::fit(
                data.x(),
                data.y(),
                data.n_classes(),
                &bootstrap,
                &active,
                mtry,
                &mut rng,
                &mut imp,
            );
            // Per-tree normalization before averaging across trees.
            let total: f64 = imp.iter().sum();
            if total > 0.0 {
                for v in imp.iter_mut() {
                    *v /= total;
                }
            }
            (tree, imp)
        })
        .collect();

    let mut importances = vec![0.0f64; d];
    let mut trees = Vec::with_capacity(params.n_estimators);
    for (tree, imp) in per_tree {
        for (acc, v) in importances.iter_mut().zip(&imp) {
            *acc += v;
        }
        trees.push(tree);
    }
    let total: f64 = importances.iter().sum();
    if total > 0.0 {
        for v in importances.iter_mut() {
            *v /= total;
        }
    }

    Ok(ForestModel {
        trees,
        n_features: d,
        n_classes: data.n_classes(),
        params,
        importances,
        registry_hash: None,
    })
}

impl<S: Scalar> ForestModel<S> {
    /// Per-row class probabilities: mean of each tree's leaf class
    /// frequencies. Rows sum to 1 up to rounding.
    pub fn predict_proba(&self, x: &Matrix<S>) -> Result<Vec<Vec<f64>>> {
        if x.cols() != self.n_features {
            return Err(CoreError::LengthMismatch(self.n_features, x.cols()));
        }
        let inv_trees = 1.0 / self.trees.len() as f64;
        Ok(x.iter_rows()
            .map(|row| {
                let mut acc = vec![0.0f64; self.n_classes];
                for tree in &self.trees {
                    let counts = tree.leaf_counts(row);
                    let total: u32 = counts.iter().sum();
                    if total > 0 {
                        let inv = 1.0 / total as f64;
                        for (a, &c) in acc.iter_mut().zip(counts) {
                            *a += c as f64 * inv;
                        }
                    }
                }
                for a in acc.iter_mut() {
                    *a *= inv_trees;
                }
                acc
            })
            .collect())
    }

    /// Argmax class per row; probability ties break to the lower class.
    pub fn predict(&self, x: &Matrix<S>) -> Result<Vec<usize>> {
        Ok(self
            .predict_proba(x)?
            .into_iter()
            .map(|row| {
                let mut best = 0;
                for (k, &p) in row.iter().enumerate() {
                    if p > row[best] {
                        best = k;
                    }
                }
                best
            })
            .collect())
    }

    /// Reject inputs extracted under a different feature registry.
    pub fn check_registry(&self, got: &str) -> Result<()> {
        match &self.registry_hash {
            Some(expected) if expected != got => Err(CoreError::RegistryMismatch {
                expected: expected.clone(),
                got: got.to_string(),
            }),
            _ => Ok(()),
        }
    }

    pub fn save_json(&self, path: &std::path::Path) -> Result<()>
    where
        S: Serialize,
    {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(file, self)?;
        Ok(())
    }

    pub fn load_json(path: &std::path::Path) -> Result<Self>
    where
        S: serde::de::DeserializeOwned,
    {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        Ok(serde_json::from_reader(file)?)
    }
}
