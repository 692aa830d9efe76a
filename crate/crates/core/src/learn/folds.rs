//! Fold planners: stratified K-fold with seeded shuffling, and expanding
//! time-series splits where training always precedes testing.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoldKind {
    StratifiedKfold,
    TimeseriesSplit,
}

/// Cross-validation plan; `shuffle`/`seed` apply to the stratified kind only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub kind: FoldKind,
    pub n_splits: usize,
    pub shuffle: bool,
    pub seed: u64,
}

impl FoldPlan {
    /// Shuffled stratified 5-fold, seed 42: the surrogate-task plan.
    pub fn stratified() -> Self {
        FoldPlan { kind: FoldKind::StratifiedKfold, n_splits: 5, shuffle: true, seed: 42 }
    }

    /// Expanding 5-way time-series split: the FP-task plan.
    pub fn timeseries() -> Self {
        FoldPlan { kind: FoldKind::TimeseriesSplit, n_splits: 5, shuffle: false, seed: 0 }
    }
}

/// (train indices, test indices) per fold, both ascending.
pub fn make_folds(plan: &FoldPlan, labels: &[usize]) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let n = labels.len();
    if plan.n_splits < 2 {
        return Err(CoreError::FoldPlan(format!("{} splits", plan.n_splits)));
    }
    if n < plan.n_splits {
        return Err(CoreError::FoldPlan(format!(
            "{n} samples cannot fill {} folds",
            plan.n_splits
        )));
    }
    match plan.kind {
        FoldKind::StratifiedKfold => stratified(plan, labels),
        FoldKind::TimeseriesSplit => timeseries(plan.n_splits, n),
    }
}

fn stratified(plan: &FoldPlan, labels: &[usize]) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let k = plan.n_splits;
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    for (&class, members) in &by_class {
        if members.len() < k {
            return Err(CoreError::FoldPlan(format!(
                "class {class} has {} members, fewer than {k} folds",
                members.len()
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut tests: Vec<Vec<usize>> = vec![Vec::new(); k];
    for members in by_class.values() {
        let mut order = members.clone();
        if plan.shuffle {
            order.shuffle(&mut rng);
        }
        // Fold f takes one extra member while the remainder lasts.
        let base = order.len() / k;
        let extra = order.len() % k;
        let mut at = 0;
        for (f, test) in tests.iter_mut().enumerate() {
            let take = base + usize::from(f < extra);
            test.extend_from_slice(&order[at..at + take]);
            at += take;
        }
    }

    let n = labels.len();
    Ok(tests
        .into_iter()
        .map(|mut test| {
            test.sort_unstable();
            let mut in_test = vec![false; n];
            for &i in &test {
                in_test[i] = true;
            }
            let train = (0..n).filter(|&i| !in_test[i]).collect();
            (train, test)
        })
        .collect())
}

fn timeseries(k: usize, n: usize) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let test_size = n / (k + 1);
    if test_size == 0 {
        return Err(CoreError::FoldPlan(format!(
            "{n} samples leave no room for {k} time-series test folds"
        )));
    }
    let first_test = n - k * test_size;
    Ok((0..k)
        .map(|f| {
            let start = first_test + f * test_size;
            ((0..start).collect(), (start..start + test_size).collect())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_pairs_land_one_per_fold() {
        let labels: Vec<usize> = (0..10).map(|i| i % 2).collect();
        let folds = make_folds(&FoldPlan::stratified(), &labels).unwrap();
        assert_eq!(folds.len(), 5);
        for (train, test) in &folds {
            assert_eq!(test.len(), 2);
            assert_eq!(train.len(), 8);
            let classes: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
            assert!(classes.contains(&0) && classes.contains(&1));
        }
    }

    #[test]
    fn stratified_tests_partition_all_indices() {
        let labels: Vec<usize> = (0..103).map(|i| i % 3).collect();
        let folds = make_folds(&FoldPlan::stratified(), &labels).unwrap();
        let mut seen = vec![0usize; labels.len()];
        for (train, test) in &folds {
            for &i in test {
                seen[i] += 1;
            }
            // Train and test are disjoint and cover everything.
            let mut all: Vec<usize> = train.iter().chain(test.iter()).copied().collect();
            all.sort_unstable();
            assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn stratified_class_counts_are_balanced_within_one() {
        // 3 classes with uneven sizes 50/33/20.
        let mut labels = vec![0usize; 50];
        labels.extend(vec![1usize; 33]);
        labels.extend(vec![2usize; 20]);
        let folds = make_folds(&FoldPlan::stratified(), &labels).unwrap();
        for class in 0..3usize {
            let per_fold: Vec<usize> = folds
                .iter()
                .map(|(_, test)| test.iter().filter(|&&i| labels[i] == class).count())
                .collect();
            let lo = per_fold.iter().min().unwrap();
            let hi = per_fold.iter().max().unwrap();
            assert!(hi - lo <= 1, "class {class}: {per_fold:?}");
        }
    }

    #[test]
    fn stratified_is_seed_deterministic() {
        let labels: Vec<usize> = (0..40).map(|i| i % 2).collect();
        let a = make_folds(&FoldPlan::stratified(), &labels).unwrap();
        let b = make_folds(&FoldPlan::stratified(), &labels).unwrap();
        assert_eq!(a, b);
        let other =
            make_folds(&FoldPlan { seed: 7, ..FoldPlan::stratified() }, &labels).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn sparse_class_is_rejected() {
        let mut labels = vec![0usize; 20];
        labels.extend(vec![1usize; 3]);
        assert!(matches!(
            make_folds(&FoldPlan::stratified(), &labels),
            Err(CoreError::FoldPlan(_))
        ));
    }

    #[test]
    fn timeseries_trains_strictly_before_tests() {
        let labels = vec![0usize; 10];
        let folds = make_folds(&FoldPlan::timeseries(), &labels).unwrap();
        assert_eq!(folds.len(), 5);
        let mut prev_train_len = 0;
        for (train, test) in &folds {
            assert!(train.iter().max().unwrap() < test.iter().min().unwrap());
            assert!(train.len() > prev_train_len, "expanding window");
            prev_train_len = train.len();
            assert_eq!(test.len(), 1);
        }
        // Last fold ends exactly at the final sample.
        assert_eq!(*folds[4].1.last().unwrap(), 9);
    }

    #[test]
    fn timeseries_sizes_match_expanding_formula() {
        let labels = vec![0usize; 137];
        let folds = make_folds(&FoldPlan::timeseries(), &labels).unwrap();
        let test_size = 137 / 6;
        for (f, (train, test)) in folds.iter().enumerate() {
            assert_eq!(test.len(), test_size);
            assert_eq!(train.len(), 137 - 5 * test_size + f * test_size);
        }
    }

    #[test]
    fn infeasible_plans_error() {
        assert!(make_folds(&FoldPlan::stratified(), &[0, 1, 0]).is_err());
        assert!(make_folds(&FoldPlan::timeseries(), &vec![0; 5]).is_err());
        let one_split = FoldPlan { n_splits: 1, ..FoldPlan::stratified() };
        assert!(make_folds(&one_split, &vec![0; 10]).is_err());
    }
}
