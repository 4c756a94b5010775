//! Classification metrics, Pareto fronts and comparison reports.

mod pareto;
mod report;

pub use pareto::{pareto_front, ParetoPoint};
pub use report::{report, write_pareto_csv, ComparisonReport, ReportRow, RowKind};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("{predictions} predictions for {labels} labels")]
    LengthMismatch { predictions: usize, labels: usize },
    #[error("no rows to score")]
    Empty,
    #[error("no results to report")]
    NoResults,
    #[error("result for seed {seed} cannot be evaluated: {message}")]
    BadResult { seed: u64, message: String },
}

/// Which F-measure drives search and selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum RewardKind {
    #[default]
    #[serde(alias = "f1")]
    F1,
    #[serde(alias = "f2")]
    F2,
}

impl std::fmt::Display for RewardKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RewardKind::F1 => "F1",
            RewardKind::F2 => "F2",
        })
    }
}

impl std::str::FromStr for RewardKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "f1" => Ok(RewardKind::F1),
            "f2" => Ok(RewardKind::F2),
            _ => Err(format!("unknown reward {s:?} (expected F1 or F2)")),
        }
    }
}

/// Counts with fraud as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn add(&mut self, predicted: bool, actual: bool) {
        match (predicted, actual) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fn_ += 1,
        }
    }
}

pub fn confusion(predictions: &[bool], labels: &[bool]) -> Result<ConfusionMatrix, EvalError> {
    if predictions.len() != labels.len() {
        return Err(EvalError::LengthMismatch { predictions: predictions.len(), labels: labels.len() });
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &l) in predictions.iter().zip(labels) {
        cm.add(p, l);
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub f2: f64,
}

impl Metrics {
    pub fn score(&self, kind: RewardKind) -> f64 {
        match kind {
            RewardKind::F1 => self.f1,
            RewardKind::F2 => self.f2,
        }
    }

    /// Field-wise mean; `None` for an empty slice.
    pub fn mean(all: &[Metrics]) -> Option<Metrics> {
        if all.is_empty() {
            return None;
        }
        let n = all.len() as f64;
        let avg = |f: fn(&Metrics) -> f64| all.iter().map(f).sum::<f64>() / n;
        Some(Metrics {
            accuracy: avg(|m| m.accuracy),
            precision: avg(|m| m.precision),
            recall: avg(|m| m.recall),
            f1: avg(|m| m.f1),
            f2: avg(|m| m.f2),
        })
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// F-beta from precision and recall, 0 when both are 0.
pub fn f_beta(precision: f64, recall: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let den = b2 * precision + recall;
    if den == 0.0 {
        0.0
    } else {
        (1.0 + b2) * precision * recall / den
    }
}

/// Precision and recall are 0 when their denominators are; F-scores are 0
/// when precision and recall both are.
pub fn metrics(cm: &ConfusionMatrix) -> Result<Metrics, EvalError> {
    if cm.total() == 0 {
        return Err(EvalError::Empty);
    }
    let precision = ratio(cm.tp, cm.tp + cm.fp);
    let recall = ratio(cm.tp, cm.tp + cm.fn_);
    Ok(Metrics {
        accuracy: ratio(cm.tp + cm.tn, cm.total()),
        precision,
        recall,
        f1: f_beta(precision, recall, 1.0),
        f2: f_beta(precision, recall, 2.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn confusion_examples() {
        let cm = confusion(&[true, false, true], &[true, false, true]).unwrap();
        assert_eq!(cm, ConfusionMatrix { tp: 2, fp: 0, tn: 1, fn_: 0 });
        assert_eq!(confusion(&[true, true], &[false, false]).unwrap().fp, 2);
        assert_eq!(confusion(&[], &[]).unwrap(), ConfusionMatrix::default());
        assert!(confusion(&[true], &[]).is_err());
    }

    #[test]
    fn metric_conventions() {
        let perfect = metrics(&ConfusionMatrix { tp: 3, fp: 0, tn: 2, fn_: 0 }).unwrap();
        assert_eq!((perfect.f1, perfect.f2, perfect.accuracy), (1.0, 1.0, 1.0));
        let none = metrics(&ConfusionMatrix { tp: 0, fp: 0, tn: 5, fn_: 5 }).unwrap();
        assert_eq!((none.precision, none.recall, none.f1, none.f2), (0.0, 0.0, 0.0, 0.0));
        let wrong = metrics(&ConfusionMatrix { tp: 0, fp: 4, tn: 0, fn_: 1 }).unwrap();
        assert_eq!((wrong.precision, wrong.f1), (0.0, 0.0));
        assert_eq!(metrics(&ConfusionMatrix::default()), Err(EvalError::Empty));
    }

    #[test]
    fn anchor_f1() {
        // Exactly P = 0.154, R = 0.256 gives 0.1923; these counts round to
        // the same precision and recall at three places.
        let m = metrics(&ConfusionMatrix { tp: 40, fp: 219, tn: 10_000, fn_: 116 }).unwrap();
        assert!((m.precision - 0.154).abs() < 5e-4);
        assert!((m.recall - 0.256).abs() < 5e-4);
        assert!((m.f1 - 0.193).abs() <= 5e-4, "{}", m.f1);
    }

    #[test]
    fn reward_kind_parsing() {
        assert_eq!("f2".parse::<RewardKind>().unwrap(), RewardKind::F2);
        assert!("F3".parse::<RewardKind>().is_err());
        assert_eq!(serde_json::to_string(&RewardKind::F1).unwrap(), "\"F1\"");
    }

    fn cm_strategy() -> impl Strategy<Value = ConfusionMatrix> {
        (0u64..500, 0u64..500, 0u64..500, 0u64..500).prop_map(|(tp, fp, tn, fn_)| ConfusionMatrix { tp, fp, tn, fn_ })
    }

    proptest! {
        #[test]
        fn matches_direct_definition(pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..200)) {
            let (preds, labels): (Vec<bool>, Vec<bool>) = pairs.into_iter().unzip();
            let m = metrics(&confusion(&preds, &labels).unwrap()).unwrap();
            let tp = preds.iter().zip(&labels).filter(|(p, l)| **p && **l).count() as f64;
            let pp = preds.iter().filter(|p| **p).count() as f64;
            let ap = labels.iter().filter(|l| **l).count() as f64;
            let correct = preds.iter().zip(&labels).filter(|(p, l)| p == l).count() as f64;
            let p = if pp > 0.0 { tp / pp } else { 0.0 };
            let r = if ap > 0.0 { tp / ap } else { 0.0 };
            let f1 = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
            let f2 = if 4.0 * p + r > 0.0 { 5.0 * p * r / (4.0 * p + r) } else { 0.0 };
            prop_assert!((m.precision - p).abs() < 1e-12);
            prop_assert!((m.recall - r).abs() < 1e-12);
            prop_assert!((m.f1 - f1).abs() < 1e-12);
            prop_assert!((m.f2 - f2).abs() < 1e-12);
            prop_assert!((m.accuracy - correct / preds.len() as f64).abs() < 1e-12);
        }

        #[test]
        fn f1_vs_f2_ordering(cm in cm_strategy()) {
            prop_assume!(cm.tp > 0);
            let m = metrics(&cm).unwrap();
            for v in [m.accuracy, m.precision, m.recall, m.f1, m.f2] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            // F1 >= F2 exactly when P >= R; compare with a tolerance on the
            // near-equal boundary.
            if (m.precision - m.recall).abs() > 1e-9 {
                prop_assert_eq!(m.f1 >= m.f2, m.precision >= m.recall);
            }
        }
    }
}
