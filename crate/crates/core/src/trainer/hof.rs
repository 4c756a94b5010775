use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::eval::Metrics;
use crate::expr::Traversal;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HallOfFameEntry {
    pub expression: String,
    pub traversal: Traversal,
    pub reward: f64,
    pub complexity: u32,
    /// Scores on the training split.
    pub metrics: Metrics,
}

/// Best distinct expressions seen so far, deduplicated by rendered text.
/// Ordered by reward descending, then complexity ascending, then text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HallOfFame {
    capacity: usize,
    entries: Vec<HallOfFameEntry>,
}

fn rank(a: &HallOfFameEntry, b: &HallOfFameEntry) -> Ordering {
    b.reward.total_cmp(&a.reward).then(a.complexity.cmp(&b.complexity)).then_with(|| a.expression.cmp(&b.expression))
}

impl HallOfFame {
    pub fn new(capacity: usize) -> Self {
        HallOfFame { capacity, entries: Vec::new() }
    }

    pub fn entries(&self) -> &[HallOfFameEntry] {
        &self.entries
    }

    pub fn best(&self) -> Option<&HallOfFameEntry> {
        self.entries.first()
    }

    pub fn into_entries(self) -> Vec<HallOfFameEntry> {
        self.entries
    }

    /// Whether an entry with this reward and complexity could get in.
    pub fn would_admit(&self, reward: f64, complexity: u32) -> bool {
        if self.entries.len() < self.capacity {
            return true;
        }
        let last = self.entries.last().expect("capacity is positive");
        reward > last.reward || (reward == last.reward && complexity <= last.complexity)
    }

    /// Inserts unless the expression is already present or ranks below a
    /// full list. Returns true if the list changed.
    pub fn insert(&mut self, entry: HallOfFameEntry) -> bool {
        if self.capacity == 0 || self.entries.iter().any(|e| e.expression == entry.expression) {
            return false;
        }
        let pos = self.entries.partition_point(|e| rank(e, &entry) == Ordering::Less);
        if pos >= self.capacity {
            return false;
        }
        self.entries.insert(pos, entry);
        self.entries.truncate(self.capacity);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{metrics, ConfusionMatrix, RewardKind};

    fn entry(name: &str, reward: f64, complexity: u32) -> HallOfFameEntry {
        HallOfFameEntry {
            expression: name.into(),
            traversal: Traversal::default(),
            reward,
            complexity,
            metrics: Metrics::default(),
        }
    }

    #[test]
    fn keeps_sorted_unique_top_n() {
        let mut h = HallOfFame::new(3);
        assert!(h.insert(entry("a", 0.5, 4)));
        assert!(h.insert(entry("b", 0.7, 4)));
        assert!(!h.insert(entry("a", 0.9, 4)));
        assert!(h.insert(entry("c", 0.5, 3)));
        assert!(h.insert(entry("d", 0.6, 5)));
        let names: Vec<&str> = h.entries().iter().map(|e| e.expression.as_str()).collect();
        assert_eq!(names, ["b", "d", "c"]);
        assert!(!h.insert(entry("e", 0.1, 1)));
        assert!(!h.would_admit(0.4, 1));
        assert!(h.would_admit(0.5, 3));
    }

    #[test]
    fn f2_prefers_recall() {
        // Same F1, opposite precision/recall balance.
        let precise = metrics(&ConfusionMatrix { tp: 45, fp: 5, tn: 900, fn_: 45 }).unwrap();
        let sensitive = metrics(&ConfusionMatrix { tp: 81, fp: 81, tn: 900, fn_: 9 }).unwrap();
        assert!((precise.f1 - sensitive.f1).abs() < 1e-12);
        let mut h = HallOfFame::new(5);
        for (name, m) in [("precise", precise), ("sensitive", sensitive)] {
            h.insert(HallOfFameEntry { metrics: m, reward: m.score(RewardKind::F2), ..entry(name, 0.0, 4) });
        }
        assert_eq!(h.best().unwrap().expression, "sensitive");
    }
}
