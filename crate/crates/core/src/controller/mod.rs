//! Recurrent sampling policy over a token library.
//!
//! A single tanh cell reads one-hot parent and sibling tokens of the next
//! open slot (an extra EMPTY index stands for "none") and emits logits over
//! the library. Invalid tokens are masked to -inf before the softmax.

mod adam;
mod checkpoint;
mod params;
mod policy;

pub use adam::{AdamConfig, AdamState};
pub use checkpoint::CHECKPOINT_FORMAT;
pub use params::{Controller, ParamLayout};
pub use policy::{StepStats, Trajectory};

use crate::expr::{ConstraintConfig, ExprError, Library, Traversal};
use rand::RngCore;

#[derive(Debug, thiserror::Error)]
pub enum ControllerError {
    #[error("library size and hidden size must be positive (got {library_size} and {hidden_size})")]
    ZeroSize { library_size: usize, hidden_size: usize },
    #[error("controller was built for {expected} tokens but the library has {got}")]
    LibraryMismatch { expected: usize, got: usize },
    #[error("token {token} at step {step} is masked out (probability zero)")]
    Unreachable { step: usize, token: usize },
    #[error("no valid token at step {step}; constraint configuration is inconsistent")]
    EmptyMask { step: usize },
    #[error("{trajectories} trajectories but {advantages} advantages")]
    LengthMismatch { trajectories: usize, advantages: usize },
    #[error("advantage {value} at index {index} is negative or not finite")]
    BadAdvantage { index: usize, value: f64 },
    #[error("non-finite gradient ({non_finite} of {total} entries); step aborted")]
    NonFiniteGradient { non_finite: usize, total: usize },
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("invalid checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// New controller with uniform(-0.1, 0.1) weights drawn from `seed`. The
/// output head starts at zero, so the first policy is uniform over valid
/// tokens.
pub fn init_controller(library_size: usize, hidden_size: usize, seed: u64) -> Result<Controller, ControllerError> {
    Controller::new(library_size, hidden_size, seed)
}

pub fn sample_traversal<R: RngCore + ?Sized>(
    ctrl: &Controller,
    lib: &Library,
    cfg: &ConstraintConfig,
    rng: &mut R,
) -> Result<Trajectory, ControllerError> {
    ctrl.sample(lib, cfg, rng)
}

/// Total log-probability of `t` and its gradient with respect to every
/// parameter (flat, in [`ParamLayout`] order).
pub fn log_prob_and_grad(
    ctrl: &Controller,
    t: &Traversal,
    lib: &Library,
    cfg: &ConstraintConfig,
) -> Result<(f64, Vec<f64>), ControllerError> {
    ctrl.log_prob_and_grad(t, lib, cfg)
}

/// One Adam ascent step on
/// `mean_i(advantage_i * log p(t_i) + entropy_weight * H(t_i))`.
pub fn gradient_step(
    ctrl: &mut Controller,
    lib: &Library,
    cfg: &ConstraintConfig,
    trajectories: &[Trajectory],
    advantages: &[f64],
    learning_rate: f64,
    entropy_weight: f64,
) -> Result<StepStats, ControllerError> {
    ctrl.gradient_step(lib, cfg, trajectories, advantages, learning_rate, entropy_weight)
}
