//! Risk-seeking policy-gradient search over fuzzy expressions.

mod config;
mod hof;
mod run;

pub use config::{Method, SearchMode, TrainConfig};
pub use hof::{HallOfFame, HallOfFameEntry};
pub use run::{
    run_seed_sweep, train, train_with_observer, write_training_log, BatchEvent, BatchSummary, RunMetadata, SeedSweep,
    TrainResult,
};

use crate::controller::ControllerError;
use crate::data::FuzzyDataset;
use crate::eval::{confusion, metrics, EvalError, Metrics, RewardKind};
use crate::expr::{evaluate_batch, ExprError, ExprTree};

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("training data contains only one class; the reward carries no signal")]
    SingleClass,
    #[error("training data is empty")]
    EmptyData,
    #[error(transparent)]
    Controller(#[from] ControllerError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Data(#[from] crate::data::DataError),
}

/// Predictions are `score >= threshold`.
pub fn predict(scores: &[f64], threshold: f64) -> Vec<bool> {
    scores.iter().map(|&s| s >= threshold).collect()
}

/// Metrics of `tree` on `data` at `threshold`.
pub fn score_tree(tree: &ExprTree, data: &FuzzyDataset, threshold: f64) -> Result<Metrics, TrainError> {
    let scores: Vec<f64> = evaluate_batch(tree, data)?.into_iter().map(f64::from).collect();
    Ok(metrics(&confusion(&predict(&scores, threshold), data.labels())?)?)
}

/// F1 or F2 of the thresholded expression on `data`.
pub fn compute_reward(
    tree: &ExprTree,
    data: &FuzzyDataset,
    threshold: f64,
    kind: RewardKind,
) -> Result<f64, TrainError> {
    Ok(score_tree(tree, data, threshold)?.score(kind))
}

/// Keeps the top `ceil(epsilon * n)` rewards plus anything tied with the
/// smallest of them. Returns that cutoff and the kept indices in input
/// order.
pub fn risk_filter(rewards: &[f64], epsilon: f64) -> (f64, Vec<usize>) {
    if rewards.is_empty() {
        return (f64::NAN, Vec::new());
    }
    let n = rewards.len();
    // The small slack keeps 0.05 * 500 from rounding up to 26.
    let k = ((epsilon * n as f64 - 1e-9).ceil() as usize).clamp(1, n);
    let mut sorted = rewards.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let cutoff = sorted[k - 1];
    let kept = (0..n).filter(|&i| rewards[i] >= cutoff).collect();
    (cutoff, kept)
}
