//! Deterministic learning core: random forest and logistic-regression
//! classifiers, fold planners, and the metrics used by selection,
//! correlation, and FP evaluation.

pub mod dataset;
pub mod folds;
pub mod forest;
pub mod logreg;
pub mod metrics;
pub mod tree;

pub use dataset::{Dataset, Matrix};
pub use folds::{make_folds, FoldKind, FoldPlan};
pub use forest::{train_forest, ForestModel, ForestParams};
pub use logreg::{train_logreg_sgd, LinearModel, LogregParams};
pub use metrics::{classification_metrics, pearson, threshold_binary, Metrics};
