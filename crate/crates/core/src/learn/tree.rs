//! Single CART decision tree: Gini impurity, best-threshold splits over a
//! random feature subset, grown to purity or a minimum of two samples.
//!
//! Split records keep original column indices so importances stay aligned
//! with the feature registry regardless of any active-feature mask.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::learn::dataset::Matrix;
use crate::scalar::Scalar;

/// One tree node; children refer into the arena by index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de>"))]
pub enum Node<S> {
    Split { feature: usize, threshold: S, left: usize, right: usize },
    Leaf { counts: Vec<u32> },
}

/// Arena-backed binary decision tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de>"))]
pub struct DecisionTree<S> {
    nodes: Vec<Node<S>>,
}

/// Gini impurity of integer class counts summing to `n`.
pub(crate) fn gini(counts: &[u32], n: usize) -> f64 {
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64) * (c as f64)).sum::<f64>() / (n * n)
}

fn class_counts(y: &[usize], indices: &[usize], k: usize) -> Vec<u32> {
    let mut counts = vec![0u32; k];
    for &i in indices {
        counts[y[i]] += 1;
    }
    counts
}

struct Builder<'a, S: Scalar> {
    x: &'a Matrix<S>,
    y: &'a [usize],
    k: usize,
    active: &'a [usize],
    mtry: usize,
    n_total: f64,
    nodes: Vec<Node<S>>,
    importances: &'a mut [f64],
}

impl<'a, S: Scalar> Builder<'a, S> {
    /// Grow the subtree over `indices` (a bootstrap multiset) and return its
    /// arena index.
    fn build(&mut self, indices: &[usize], rng: &mut ChaCha8Rng) -> usize {
        let n = indices.len();
        let counts = class_counts(self.y, indices, self.k);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if n < 2 || pure {
            self.nodes.push(Node::Leaf { counts });
            return self.nodes.len() - 1;
        }

        let parent_gini = gini(&counts, n);
        let mtry = self.mtry.min(self.active.len());
        let candidates = rand::seq::index::sample(rng, self.active.len(), mtry);

        let mut best: Option<(f64, usize, S)> = None;
        let mut sorted: Vec<usize> = Vec::with_capacity(n);
        for pos in candidates.iter() {
            let f = self.active[pos];
            sorted.clear();
            sorted.extend_from_slice(indices);
            sorted.sort_unstable_by(|&a, &b| {
                self.x
                    .get(a, f)
                    .partial_cmp(&self.x.get(b, f))
                    .expect("finite feature values")
                    .then(a.cmp(&b))
            });

            let mut left = vec![0u32; self.k];
            let mut right = counts.clone();
            for split in 1..n {
                let moved = self.y[sorted[split - 1]];
                left[moved] += 1;
                right[moved] -= 1;
                let v_prev = self.x.get(sorted[split - 1], f);
                let v_next = self.x.get(sorted[split], f);
                if v_next <= v_prev {
                    continue;
                }
                let wl = split as f64 / n as f64;
                let decrease =
                    parent_gini - wl * gini(&left, split) - (1.0 - wl) * gini(&right, n - split);
                // Equal decreases break toward the smaller threshold: a
                // value-based rule, so column permutations relabel the tree
                // without changing its structure.
                let threshold = (v_prev + v_next) / S::of(2.0);
                if best.map_or(true, |(d, _, t)| decrease > d || (decrease == d && threshold < t)) {
                    best = Some((decrease, f, threshold));
                }
            }
        }

        // Every sampled feature constant on this node: no split exists.
        let Some((decrease, feature, threshold)) = best else {
            self.nodes.push(Node::Leaf { counts });
            return self.nodes.len() - 1;
        };

        self.importances[feature] += n as f64 / self.n_total * decrease;

        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
            indices.iter().copied().partition(|&i| self.x.get(i, feature) <= threshold);

        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { counts: Vec::new() });
        let left = self.build(&left_idx, rng);
        let right = self.build(&right_idx, rng);
        self.nodes[id] = Node::Split { feature, threshold, left, right };
        id
    }
}

impl<S: Scalar> DecisionTree<S> {
    /// Fit one tree on the multiset `indices` (bootstrap sample), considering
    /// `mtry` of the `active` columns per split. Unnormalized impurity
    /// decreases accumulate into `importances` (indexed by original column).
    pub fn fit(
        x: &Matrix<S>,
        y: &[usize],
        n_classes: usize,
        indices: &[usize],
        active: &[usize],
        mtry: usize,
        rng: &mut ChaCha8Rng,
        importances: &mut [f64],
    ) -> Self {
        debug_assert!(!indices.is_empty());
        let mut b = Builder {
            x,
            y,
            k: n_classes,
            active,
            mtry,
            n_total: indices.len() as f64,
            nodes: Vec::new(),
            importances,
        };
        b.build(indices, rng);
        DecisionTree { nodes: b.nodes }
    }

    /// Class counts of the leaf this row falls into.
    pub fn leaf_counts(&self, row: &[S]) -> &[u32] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Split { feature, threshold, left, right } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
                Node::Leaf { counts } => return counts,
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn column(values: &[f64]) -> Matrix<f64> {
        Matrix::new(values.to_vec(), values.len(), 1).unwrap()
    }

    #[test]
    fn gini_hand_values() {
        assert_eq!(gini(&[10, 0], 10), 0.0);
        assert_eq!(gini(&[5, 5], 10), 0.5);
        assert!((gini(&[1, 1, 1, 1], 4) - 0.75).abs() < 1e-15);
        assert!((gini(&[9, 1], 10) - 0.18).abs() < 1e-15);
    }

    /// Exhaustive best-split search over one column, independent of the
    /// builder's incremental sweep.
    fn brute_force_best_split(x: &[f64], y: &[usize], k: usize) -> (f64, f64) {
        let n = x.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap().then(a.cmp(&b)));
        let total = {
            let mut c = vec![0u32; k];
            for &l in y {
                c[l] += 1;
            }
            c
        };
        let parent = gini(&total, n);
        let mut best = (f64::NEG_INFINITY, f64::NAN);
        for split in 1..n {
            let (lo, hi) = (x[order[split - 1]], x[order[split]]);
            if hi <= lo {
                continue;
            }
            let thr = (lo + hi) / 2.0;
            let mut left = vec![0u32; k];
            let mut nl = 0usize;
            for i in 0..n {
                if x[i] <= thr {
                    left[y[i]] += 1;
                    nl += 1;
                }
            }
            let right: Vec<u32> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
            let wl = nl as f64 / n as f64;
            let dec = parent - wl * gini(&left, nl) - (1.0 - wl) * gini(&right, n - nl);
            if dec > best.0 {
                best = (dec, thr);
            }
        }
        best
    }

    #[test]
    fn root_split_matches_brute_force() {
        let mut r = rng(7);
        for trial in 0..20 {
            let n = 40;
            let x: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
            // Noisy threshold labels so the best split is non-trivial.
            let y: Vec<usize> = x
                .iter()
                .enumerate()
                .map(|(i, &v)| if (v > 0.2) ^ (i % 7 == 0) { 1 } else { 0 })
                .collect();
            let m = column(&x);
            let indices: Vec<usize> = (0..n).collect();
            let mut imp = vec![0.0];
            let tree =
                DecisionTree::fit(&m, &y, 2, &indices, &[0], 1, &mut rng(trial), &mut imp);
            let Node::Split { threshold, .. } = &tree.nodes[0] else {
                panic!("expected a split at the root");
            };
            let (_, expected_thr) = brute_force_best_split(&x, &y, 2);
            assert_eq!(*threshold, expected_thr, "trial {trial}");
        }
    }

    #[test]
    fn pure_node_is_single_leaf() {
        let m = column(&[1.0, 2.0, 3.0]);
        let y = vec![1, 1, 1];
        let mut imp = vec![0.0];
        let tree = DecisionTree::fit(&m, &y, 2, &[0, 1, 2], &[0], 1, &mut rng(0), &mut imp);
        assert_eq!(tree.node_count(), 1);
        assert_eq!(tree.leaf_counts(&[2.0]), &[0, 3]);
        assert_eq!(imp, vec![0.0]);
    }

    #[test]
    fn separable_data_grows_to_purity() {
        let x: Vec<f64> = (0..30).map(|i| i as f64 / 10.0 - 1.5).collect();
        let y: Vec<usize> = x.iter().map(|&v| usize::from(v > 0.0)).collect();
        let m = column(&x);
        let indices: Vec<usize> = (0..30).collect();
        let mut imp = vec![0.0];
        let tree = DecisionTree::fit(&m, &y, 2, &indices, &[0], 1, &mut rng(3), &mut imp);
        for (i, &v) in x.iter().enumerate() {
            let counts = tree.leaf_counts(&[v]);
            let pred = if counts[1] > counts[0] { 1 } else { 0 };
            assert_eq!(pred, y[i], "sample {i}");
        }
        assert!(imp[0] > 0.0);
    }

    #[test]
    fn conflicting_duplicates_become_mixed_leaf() {
        // Identical x with both labels cannot be split.
        let m = column(&[1.0, 1.0, 1.0, 1.0]);
        let y = vec![0, 1, 0, 1];
        let mut imp = vec![0.0];
        let tree = DecisionTree::fit(&m, &y, 2, &[0, 1, 2, 3], &[0], 1, &mut rng(0), &mut imp);
        assert_eq!(tree.node_count(), 1);
        assert_eq!(tree.leaf_counts(&[1.0]), &[2, 2]);
        assert_eq!(imp, vec![0.0]);
    }

    #[test]
    fn same_rng_same_tree() {
        let mut r = rng(11);
        let n = 60;
        let x: Vec<f64> = (0..n * 3).map(|_| r.gen_range(-1.0..1.0)).collect();
        let m = Matrix::new(x, n, 3).unwrap();
        let y: Vec<usize> = (0..n).map(|i| usize::from(m.get(i, 1) > 0.0)).collect();
        let indices: Vec<usize> = (0..n).collect();
        let active = [0, 1, 2];
        let mut imp_a = vec![0.0; 3];
        let mut imp_b = vec![0.0; 3];
        let a = DecisionTree::fit(&m, &y, 2, &indices, &active, 1, &mut rng(5), &mut imp_a);
        let b = DecisionTree::fit(&m, &y, 2, &indices, &active, 1, &mut rng(5), &mut imp_b);
        assert_eq!(a, b);
        assert_eq!(imp_a, imp_b);
    }
}
