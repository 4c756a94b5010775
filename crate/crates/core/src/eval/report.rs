use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{pareto_front, EvalError, Metrics, ParetoPoint, RewardKind};
use crate::data::FuzzyDataset;
use crate::expr::tree_from_traversal;
use crate::trainer::{score_tree, Method, SearchMode, TrainResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    /// The single best expression across seeds.
    Best,
    /// Mean over seeds of each seed's best expression.
    Average,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: Method,
    pub reward: RewardKind,
    pub mode: SearchMode,
    pub kind: RowKind,
    pub n_seeds: usize,
    /// Scores on the test split.
    pub metrics: Metrics,
    /// Best rows only.
    pub expression: Option<String>,
    pub complexity: Option<u32>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub threshold: f64,
    pub rows: Vec<ReportRow>,
    /// Front of all halls of fame pooled, scored on the test split.
    pub pareto_front: Vec<ParetoPoint>,
}

struct Group {
    method: Method,
    reward: RewardKind,
    mode: SearchMode,
    // (seed, expression, complexity, test metrics) of each run's best
    bests: Vec<(u64, String, u32, Metrics)>,
}

/// Re-scores every run's best expression on `test`. Runs are grouped by
/// (method, reward, mode); each group yields a best row, chosen by the
/// group's reward on `test`, and an average row.
pub fn report(results: &[TrainResult], test: &FuzzyDataset, threshold: f64) -> Result<ComparisonReport, EvalError> {
    if results.is_empty() {
        return Err(EvalError::NoResults);
    }
    let mut groups: Vec<Group> = Vec::new();
    let mut pool: Vec<ParetoPoint> = Vec::new();
    for r in results {
        let fail = |message: String| EvalError::BadResult { seed: r.seed, message };
        let lib = r.library().map_err(|e| fail(e.to_string()))?;
        let view = test.select(&r.feature_names).map_err(|e| fail(e.to_string()))?;
        let kind = r.config.reward;
        let rescore = |t: &crate::expr::Traversal| -> Result<(u32, Metrics), EvalError> {
            let tree = tree_from_traversal(t, &lib).map_err(|e| fail(e.to_string()))?;
            let m = score_tree(&tree, &view, threshold).map_err(|e| fail(e.to_string()))?;
            Ok((tree.complexity(), m))
        };
        let (complexity, m) = rescore(&r.best.traversal)?;
        for e in &r.hall_of_fame {
            let (c, m) = rescore(&e.traversal)?;
            pool.push(ParetoPoint { complexity: c, reward: m.score(kind), expression: e.expression.clone() });
        }
        let key = (r.config.method, kind, r.config.mode);
        let entry = (r.seed, r.best.expression.clone(), complexity, m);
        match groups.iter_mut().find(|g| (g.method, g.reward, g.mode) == key) {
            Some(g) => g.bests.push(entry),
            None => groups.push(Group { method: key.0, reward: key.1, mode: key.2, bests: vec![entry] }),
        }
    }

    let mut rows = Vec::new();
    for g in &groups {
        let top = g
            .bests
            .iter()
            .max_by(|a, b| a.3.score(g.reward).total_cmp(&b.3.score(g.reward)).then(b.2.cmp(&a.2)))
            .expect("groups are non-empty");
        let base = ReportRow {
            method: g.method,
            reward: g.reward,
            mode: g.mode,
            kind: RowKind::Best,
            n_seeds: g.bests.len(),
            metrics: top.3,
            expression: Some(top.1.clone()),
            complexity: Some(top.2),
            seed: Some(top.0),
        };
        let all: Vec<Metrics> = g.bests.iter().map(|b| b.3).collect();
        rows.push(ReportRow {
            kind: RowKind::Average,
            metrics: Metrics::mean(&all).expect("non-empty"),
            expression: None,
            complexity: None,
            seed: None,
            ..base.clone()
        });
        rows.insert(rows.len() - 1, base);
    }
    Ok(ComparisonReport { threshold, rows, pareto_front: pareto_front(&pool) })
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned plain-text table, one line per row.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<12} {:<6} {:<13} {:<7} {:>5} {:>8} {:>9} {:>6} {:>6} {:>6} {:>4}  expression",
            "method", "reward", "mode", "row", "seeds", "accuracy", "precision", "recall", "f1", "f2", "cx"
        );
        for r in &self.rows {
            let kind = match r.kind {
                RowKind::Best => "best",
                RowKind::Average => "average",
            };
            let mode = match r.mode {
                SearchMode::Unconstrained => "unconstrained",
                SearchMode::Constrained => "constrained",
            };
            let m = &r.metrics;
            let _ = writeln!(
                out,
                "{:<12} {:<6} {:<13} {:<7} {:>5} {:>8.3} {:>9.3} {:>6.3} {:>6.3} {:>6.3} {:>4}  {}",
                r.method.to_string(),
                r.reward.to_string(),
                mode,
                kind,
                r.n_seeds,
                m.accuracy,
                m.precision,
                m.recall,
                m.f1,
                m.f2,
                r.complexity.map_or("-".to_string(), |c| c.to_string()),
                r.expression.as_deref().unwrap_or("-"),
            );
        }
        out
    }
}

/// `complexity,reward,expression` rows of a front.
pub fn write_pareto_csv<W: Write>(front: &[ParetoPoint], writer: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| std::io::Error::other(e);
    w.write_record(["complexity", "reward", "expression"]).map_err(io)?;
    for p in front {
        w.write_record([p.complexity.to_string(), p.reward.to_string(), p.expression.clone()]).map_err(io)?;
    }
    w.flush()
}
