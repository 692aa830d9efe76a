//! Recursive feature elimination with cross-validation, and the
//! surrogate-to-fault-prediction correlation study.
//!
//! Both operations score feature subsets by retraining the forest from
//! scratch on each cross-validation fold; nothing leaks across folds. All
//! randomness flows from explicit seeds, so results are byte-identical
//! across runs and thread counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::learn::{
    classification_metrics, make_folds, pearson, train_forest, Dataset, FoldPlan, ForestParams,
};
use crate::scalar::Scalar;

/// How many features leave the active set per elimination round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RfeSchedule {
    /// Remove exactly this many features per round.
    Fixed(usize),
    /// Remove 5% of the active set per round (at least one feature, never
    /// past the floor) while more than `floor` features remain, then one
    /// feature per round.
    Accelerated { floor: usize },
}

impl RfeSchedule {
    /// Features to remove when `active` remain. Always in `1..=active` for
    /// `active > 0`.
    pub fn step(&self, active: usize) -> usize {
        match *self {
            RfeSchedule::Fixed(step) => step.min(active),
            RfeSchedule::Accelerated { floor } => {
                if active > floor {
                    (active / 20).max(1).min(active - floor)
                } else {
                    1
                }
            }
        }
    }
}

/// One elimination round: the score measured before removal and the
/// features removed afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfeIteration {
    /// Active feature count when the score was measured.
    pub size: usize,
    /// Mean test accuracy over the cross-validation folds at this size.
    pub mean_accuracy: f64,
    /// Features eliminated after scoring, lowest importance first.
    pub removed: Vec<usize>,
}

/// Full elimination history plus the best-scoring feature set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfeTrace {
    pub iterations: Vec<RfeIteration>,
    /// Size of the chosen set; accuracy ties go to the smaller size.
    pub chosen_size: usize,
    /// Mean cross-validation accuracy of the chosen set.
    pub chosen_accuracy: f64,
    /// Feature ids of the chosen set, ascending.
    pub chosen: Vec<usize>,
}

/// Recursive feature elimination with a fixed per-round step.
///
/// Each round trains one forest per fold on the surviving features,
/// records the mean fold accuracy, averages the per-fold normalized
/// impurity importances, and removes the `step` least important features
/// (equal importances drop the higher feature id first). Rounds repeat
/// until no features remain; the chosen set is the one with the highest
/// mean accuracy.
pub fn rfe_cv<S: Scalar>(data: &Dataset<S>, step: usize, plan: &FoldPlan) -> Result<RfeTrace> {
    rfe_cv_with(data, RfeSchedule::Fixed(step), plan, ForestParams::default())
}

/// [`rfe_cv`] with an explicit elimination schedule and forest parameters.
pub fn rfe_cv_with<S: Scalar>(
    data: &Dataset<S>,
    schedule: RfeSchedule,
    plan: &FoldPlan,
    params: ForestParams,
) -> Result<RfeTrace> {
    if schedule == RfeSchedule::Fixed(0) {
        return Err(CoreError::InvalidParam(
            "elimination step must be at least 1".into(),
        ));
    }
    // One fold split reused across rounds: the plan is seeded, so
    // re-splitting every round would produce the same folds anyway.
    let folds = make_folds(plan, data.y())?;
    let mut active = data.active_features();

    let mut iterations = Vec::new();
    let mut best: Option<(f64, Vec<usize>)> = None;

    while !active.is_empty() {
        let (mean_accuracy, importance) = score_active(data, &active, &folds, params)?;

        let improved = best.as_ref().map_or(true, |(acc, set)| {
            mean_accuracy > *acc || (mean_accuracy == *acc && active.len() < set.len())
        });
        if improved {
            best = Some((mean_accuracy, active.clone()));
        }

        let k = schedule.step(active.len());
        let mut order = active.clone();
        // Lowest importance leaves first; equal importances drop the
        // higher feature id.
        order.sort_by(|&a, &b| importance[a].total_cmp(&importance[b]).then(b.cmp(&a)));
        order.truncate(k);
        active.retain(|f| !order.contains(f));
        iterations.push(RfeIteration { size: active.len() + k, mean_accuracy, removed: order });
    }

    let (chosen_accuracy, chosen) = best.expect("active set starts non-empty");
    Ok(RfeTrace { iterations, chosen_size: chosen.len(), chosen_accuracy, chosen })
}

/// Mean fold accuracy and fold-averaged importances for one active set.
fn score_active<S: Scalar>(
    data: &Dataset<S>,
    active: &[usize],
    folds: &[(Vec<usize>, Vec<usize>)],
    params: ForestParams,
) -> Result<(f64, Vec<f64>)> {
    let per_fold: Vec<(f64, Vec<f64>)> = folds
        .par_iter()
        .map(|(train, test)| {
            let mut sub = data.subset_rows(train)?;
            sub.set_mask(Some(active.to_vec()))?;
            let model = train_forest(&sub, params)?;
            let held = data.subset_rows(test)?;
            let pred = model.predict(held.x())?;
            let hits = pred.iter().zip(held.y()).filter(|(p, y)| p == y).count();
            Ok((hits as f64 / test.len() as f64, model.importances))
        })
        .collect::<Result<_>>()?;

    let n_folds = per_fold.len() as f64;
    let mean_accuracy = per_fold.iter().map(|(a, _)| a).sum::<f64>() / n_folds;
    let mut importance = vec![0.0f64; data.d()];
    for (_, imp) in &per_fold {
        for (total, v) in importance.iter_mut().zip(imp) {
            *total += v;
        }
    }
    for v in importance.iter_mut() {
        *v /= n_folds;
    }
    Ok((mean_accuracy, importance))
}

/// Cross-validation score of one feature subset.
#[derive(Debug, Clone, Copy)]
pub(crate) enum SubsetScore {
    Accuracy,
    F1,
}

pub(crate) fn subset_cv_score<S: Scalar>(
    data: &Dataset<S>,
    features: &[usize],
    folds: &[(Vec<usize>, Vec<usize>)],
    score: SubsetScore,
) -> Result<f64> {
    let mut total = 0.0;
    for (train, test) in folds {
        let mut sub = data.subset_rows(train)?;
        sub.set_mask(Some(features.to_vec()))?;
        let model = train_forest(&sub, ForestParams::default())?;
        let held = data.subset_rows(test)?;
        let pred = model.predict(held.x())?;
        total += match score {
            SubsetScore::Accuracy => {
                let hits = pred.iter().zip(held.y()).filter(|(p, y)| p == y).count();
                hits as f64 / test.len() as f64
            }
            SubsetScore::F1 => classification_metrics(held.y(), &pred)?.f1,
        };
    }
    Ok(total / folds.len() as f64)
}

/// One evaluated subset of the correlation study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetRecord {
    /// Feature ids, ascending.
    pub features: Vec<usize>,
    /// Stratified 5-fold accuracy on the surrogate task.
    pub surrogate_accuracy: f64,
    /// Time-series-split 5-fold F1 on the fault-prediction task.
    pub fp_f1: f64,
}

/// Result of [`correlation_study`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationStudy {
    /// Pearson correlation between the two score columns.
    pub r: f64,
    /// Two-sided p-value of `r`.
    pub p: f64,
    pub subsets: Vec<SubsetRecord>,
}

/// Score random feature subsets on both tasks and correlate the scores.
///
/// Subset sizes are uniform in `[10, 400]`, clamped to the feature count;
/// members are sampled without replacement. The surrogate task is scored
/// by stratified 5-fold accuracy, the fault-prediction task by
/// time-series-split 5-fold F1. Both datasets must have feature columns
/// from the same registry.
pub fn correlation_study<S: Scalar>(
    surrogate: &Dataset<S>,
    fp: &Dataset<S>,
    n_subsets: usize,
    seed: u64,
) -> Result<CorrelationStudy> {
    if n_subsets < 3 {
        return Err(CoreError::InvalidParam(format!(
            "{n_subsets} subsets cannot support a correlation; need at least 3"
        )));
    }
    if surrogate.d() != fp.d() {
        return Err(CoreError::LengthMismatch(surrogate.d(), fp.d()));
    }
    let d = surrogate.d();
    let lo = 10.min(d);
    let hi = 400.min(d);

    // All subsets are drawn up front from one seeded stream so that the
    // parallel evaluation below cannot influence them.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subsets: Vec<Vec<usize>> = (0..n_subsets)
        .map(|_| {
            let size = rng.gen_range(lo..=hi);
            let mut ids = rand::seq::index::sample(&mut rng, d, size).into_vec();
            ids.sort_unstable();
            ids
        })
        .collect();

    let sim_folds = make_folds(&FoldPlan::stratified(), surrogate.y())?;
    let fp_folds = make_folds(&FoldPlan::timeseries(), fp.y())?;

    let records: Vec<SubsetRecord> = subsets
        .into_par_iter()
        .map(|features| {
            let surrogate_accuracy =
                subset_cv_score(surrogate, &features, &sim_folds, SubsetScore::Accuracy)?;
            let fp_f1 = subset_cv_score(fp, &features, &fp_folds, SubsetScore::F1)?;
            Ok(SubsetRecord { features, surrogate_accuracy, fp_f1 })
        })
        .collect::<Result<_>>()?;

    let sim: Vec<f64> = records.iter().map(|s| s.surrogate_accuracy).collect();
    let fpv: Vec<f64> = records.iter().map(|s| s.fp_f1).collect();
    let (r, p) = pearson(&sim, &fpv)?;
    Ok(CorrelationStudy { r, p, subsets: records })
}
