use std::collections::HashMap;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{risk_filter, HallOfFame, HallOfFameEntry, SearchMode, TrainConfig, TrainError};
use crate::controller::{Controller, Trajectory};
use crate::data::FuzzyDataset;
use crate::eval::{metrics, ConfusionMatrix, Metrics};
use crate::expr::{
    enforce_root_implication, evaluate_columns, render, tree_from_traversal, Library, TokenId, Traversal,
};

/// One row of the training log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub batch: usize,
    pub max_reward: f64,
    pub mean_reward: f64,
    /// Reward cutoff of the risk filter.
    pub quantile: f64,
    pub best_so_far: f64,
    pub kept: usize,
    pub updated: bool,
}

/// Passed to the observer after every batch.
pub struct BatchEvent<'a> {
    pub library: &'a Library,
    pub traversals: &'a [Traversal],
    pub rewards: &'a [f64],
    pub summary: &'a BatchSummary,
}

/// Wall-clock information, kept apart so the rest of a result is
/// reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub created_unix_secs: u64,
    pub version: String,
}

impl RunMetadata {
    pub fn now() -> Self {
        let secs = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
        RunMetadata { created_unix_secs: secs, version: env!("CARGO_PKG_VERSION").to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainResult {
    pub seed: u64,
    pub config: TrainConfig,
    /// Library terminals, in token order.
    pub feature_names: Vec<String>,
    pub hall_of_fame: Vec<HallOfFameEntry>,
    pub best: HallOfFameEntry,
    pub reward_curve: Vec<BatchSummary>,
    pub n_updates: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<RunMetadata>,
}

impl TrainResult {
    /// The library the run searched over.
    pub fn library(&self) -> Result<Library, TrainError> {
        Ok(Library::build(self.config.method.library_mode(), &self.feature_names)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Scores one expression against thresholded labels.
fn score(nodes: &[crate::expr::TokenKind], data: &FuzzyDataset, threshold: f64) -> Result<Metrics, TrainError> {
    let out = evaluate_columns(nodes, data.columns(), data.n_rows())?;
    let mut cm = ConfusionMatrix::default();
    for (&v, &l) in out.iter().zip(data.labels()) {
        cm.add(v >= threshold, l);
    }
    Ok(metrics(&cm)?)
}

pub fn train(cfg: &TrainConfig, data: &FuzzyDataset) -> Result<TrainResult, TrainError> {
    train_with_observer(cfg, data, |_| {})
}

pub fn train_with_observer(
    cfg: &TrainConfig,
    data: &FuzzyDataset,
    mut observer: impl FnMut(&BatchEvent<'_>),
) -> Result<TrainResult, TrainError> {
    cfg.validate()?;
    if data.n_rows() == 0 {
        return Err(TrainError::EmptyData);
    }
    let positives = data.n_positive();
    if positives == 0 || positives == data.n_rows() {
        return Err(TrainError::SingleClass);
    }
    let data = data.without(&cfg.exclude_features);
    let lib = Library::build(cfg.method.library_mode(), data.column_names())?;
    let constraints = cfg.constraints();
    constraints.validate(&lib)?;

    let mut ctrl = Controller::new(lib.len(), cfg.hidden_size, cfg.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);

    let mut hof = HallOfFame::new(cfg.hall_of_fame_size);
    let mut curve = Vec::with_capacity(cfg.n_batches());
    let mut n_updates = 0;
    let mut best_so_far = 0.0f64;

    for batch in 0..cfg.n_batches() {
        let mut trajectories: Vec<Trajectory> = Vec::with_capacity(cfg.batch_size);
        let mut traversals: Vec<Traversal> = Vec::with_capacity(cfg.batch_size);
        // Repaired samples have no probability under the policy and are
        // scored but not trained on.
        let mut trainable = Vec::with_capacity(cfg.batch_size);
        for _ in 0..cfg.batch_size {
            let traj = ctrl.sample(&lib, &constraints, &mut rng)?;
            let root_ok =
                cfg.mode == SearchMode::Unconstrained || lib.kind(traj.traversal.tokens()[0])?.is_implication();
            if root_ok {
                traversals.push(traj.traversal.clone());
                trainable.push(true);
            } else {
                log::warn!("batch {batch}: repairing a sample without an implication root");
                traversals.push(enforce_root_implication(&traj.traversal, &lib, &mut rng)?);
                trainable.push(false);
            }
            trajectories.push(traj);
        }

        // Score each distinct traversal once.
        let mut unique: HashMap<&[TokenId], usize> = HashMap::new();
        let mut distinct: Vec<&Traversal> = Vec::new();
        let slot: Vec<usize> = traversals
            .iter()
            .map(|t| {
                *unique.entry(t.tokens()).or_insert_with(|| {
                    distinct.push(t);
                    distinct.len() - 1
                })
            })
            .collect();
        let scored: Vec<(crate::expr::ExprTree, Metrics)> = distinct
            .par_iter()
            .map(|t| {
                let tree = tree_from_traversal(t, &lib)?;
                let m = score(tree.preorder(), &data, cfg.threshold)?;
                Ok((tree, m))
            })
            .collect::<Result<_, TrainError>>()?;
        let rewards: Vec<f64> = slot.iter().map(|&s| scored[s].1.score(cfg.reward)).collect();

        let (quantile, kept) = risk_filter(&rewards, cfg.epsilon);
        let (kept_traj, advantages): (Vec<Trajectory>, Vec<f64>) =
            kept.iter().filter(|&&i| trainable[i]).map(|&i| (trajectories[i].clone(), rewards[i] - quantile)).unzip();
        let stats =
            ctrl.gradient_step(&lib, &constraints, &kept_traj, &advantages, cfg.learning_rate, cfg.entropy_weight)?;
        n_updates += usize::from(stats.updated);

        for (s, (tree, m)) in scored.iter().enumerate() {
            let reward = m.score(cfg.reward);
            if hof.would_admit(reward, tree.complexity()) {
                hof.insert(HallOfFameEntry {
                    expression: render(tree, &lib),
                    traversal: distinct[s].clone(),
                    reward,
                    complexity: tree.complexity(),
                    metrics: *m,
                });
            }
        }

        let max_reward = rewards.iter().copied().fold(0.0, f64::max);
        best_so_far = best_so_far.max(max_reward);
        let summary = BatchSummary {
            batch,
            max_reward,
            mean_reward: rewards.iter().sum::<f64>() / rewards.len() as f64,
            quantile,
            best_so_far,
            kept: kept_traj.len(),
            updated: stats.updated,
        };
        log::debug!(
            "seed {} batch {batch}: max {:.4} mean {:.4} cutoff {:.4} best {:.4}",
            cfg.seed,
            summary.max_reward,
            summary.mean_reward,
            summary.quantile,
            summary.best_so_far
        );
        observer(&BatchEvent { library: &lib, traversals: &traversals, rewards: &rewards, summary: &summary });
        curve.push(summary);
    }

    let hall_of_fame = hof.into_entries();
    let best = hall_of_fame.first().cloned().expect("at least one batch was scored");
    Ok(TrainResult {
        seed: cfg.seed,
        config: cfg.clone(),
        feature_names: lib.feature_names().to_vec(),
        hall_of_fame,
        best,
        reward_curve: curve,
        n_updates,
        metadata: None,
    })
}

/// Runs of one configuration over several seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSweep {
    pub results: Vec<TrainResult>,
    /// Mean over seeds of each run's best-expression training metrics.
    pub mean_best: Metrics,
    pub mean_best_reward: f64,
}

pub fn run_seed_sweep(cfg: &TrainConfig, data: &FuzzyDataset, seeds: &[u64]) -> Result<SeedSweep, TrainError> {
    if seeds.is_empty() {
        return Err(TrainError::Config("seed list is empty".into()));
    }
    let results =
        seeds.iter().map(|&seed| train(&TrainConfig { seed, ..cfg.clone() }, data)).collect::<Result<Vec<_>, _>>()?;
    let bests: Vec<Metrics> = results.iter().map(|r| r.best.metrics).collect();
    let mean_best = Metrics::mean(&bests).expect("non-empty");
    let mean_best_reward = results.iter().map(|r| r.best.reward).sum::<f64>() / results.len() as f64;
    Ok(SeedSweep { results, mean_best, mean_best_reward })
}

/// CSV with one row per batch.
pub fn write_training_log<W: Write>(result: &TrainResult, writer: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| std::io::Error::other(e);
    w.write_record(["batch", "max_reward", "mean_reward", "quantile", "best_so_far", "kept", "updated"]).map_err(io)?;
    for s in &result.reward_curve {
        w.write_record([
            s.batch.to_string(),
            s.max_reward.to_string(),
            s.mean_reward.to_string(),
            s.quantile.to_string(),
            s.best_so_far.to_string(),
            s.kept.to_string(),
            s.updated.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()
}
