use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub complexity: u32,
    pub reward: f64,
    pub expression: String,
}

/// Non-dominated points, sorted by complexity with strictly increasing
/// reward. Among equal (complexity, reward) the lexicographically smallest
/// expression is kept.
pub fn pareto_front(points: &[ParetoPoint]) -> Vec<ParetoPoint> {
    let mut sorted: Vec<&ParetoPoint> = points.iter().filter(|p| !p.reward.is_nan()).collect();
    sorted.sort_by(|a, b| {
        a.complexity
            .cmp(&b.complexity)
            .then(b.reward.total_cmp(&a.reward))
            .then_with(|| a.expression.cmp(&b.expression))
    });
    let mut front: Vec<ParetoPoint> = Vec::new();
    for p in sorted {
        if front.last().is_none_or(|best| p.reward > best.reward) {
            front.push(p.clone());
        }
    }
    front
}
