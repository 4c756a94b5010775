//! PaySim-shaped synthetic transactions for tests and demos.

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use super::{apply_fuzzifier, engineer_features, fit_fuzzifier, DataError, RawTransaction, TxType, FEATURE_COLUMNS};
use crate::expr::{evaluate_batch, ExprTree};
use crate::fuzzy::Semantics;

/// Probability that a planted-rule label is inverted.
pub const LABEL_FLIP_RATE: f64 = 0.02;

const HOURS: u32 = 744;
// CASH_IN, CASH_OUT, DEBIT, PAYMENT, TRANSFER, roughly as in PaySim.
const TYPE_WEIGHTS: [f64; 5] = [0.22, 0.35, 0.01, 0.34, 0.08];
// Log-amount medians per type.
const LOG_AMOUNT: [f64; 5] = [11.5, 11.8, 8.5, 9.0, 12.5];
const AMOUNT_SIGMA: f64 = 0.8;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub rows: Vec<RawTransaction>,
    /// Fraction of rows labelled fraud.
    pub fraud_rate: f64,
}

/// The fixture rule used for recovery checks: the Lukasiewicz implication
/// from `maxDest7` to `type_TRANSFER`, i.e. a transaction is fraud when it
/// is a transfer or the destination's recent maximum is low.
pub fn planted_rule() -> ExprTree {
    let col = |name: &str| ExprTree::terminal(FEATURE_COLUMNS.iter().position(|c| *c == name).expect("known column"));
    ExprTree::implies(Semantics::Lukasiewicz, col("maxDest7"), col("type_TRANSFER"))
}

/// Draws `n` transactions in step order over one month (steps 1..=743).
///
/// Without a rule, labels are Bernoulli(`fraud_rate`). With one, a row is
/// fraud when the rule evaluates to at least 0.5 on features fuzzified
/// with cutpoints fitted on all rows, then each label flips with
/// probability [`LABEL_FLIP_RATE`]. Terminal `i` in the rule refers to
/// `FEATURE_COLUMNS[i]`.
pub fn generate_synthetic(
    n: usize,
    fraud_rate: f64,
    seed: u64,
    planted_rule: Option<&ExprTree>,
) -> Result<SyntheticData, DataError> {
    if n == 0 {
        return Err(DataError::Empty);
    }
    if !(fraud_rate > 0.0 && fraud_rate < 1.0) {
        return Err(DataError::InvalidParameter(format!("fraud rate must be in (0, 1), got {fraud_rate}")));
    }
    if let Some(max) = planted_rule.and_then(ExprTree::max_feature) {
        if max >= FEATURE_COLUMNS.len() {
            return Err(crate::expr::ExprError::FeatureOutOfBounds { index: max, len: FEATURE_COLUMNS.len() }.into());
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Weekends (day-of-week 5 and 6) are quieter; nights are quieter.
    let hour_weights: Vec<f64> = (1..HOURS)
        .map(|s| {
            let dow = (s / 24) % 7;
            let hod = s % 24;
            let day = if dow >= 5 { 0.6 } else { 1.0 };
            let time = if (8..22).contains(&hod) { 1.0 } else { 0.3 };
            day * time
        })
        .collect();
    let step_dist = WeightedIndex::new(&hour_weights).expect("positive weights");
    let type_dist = WeightedIndex::new(TYPE_WEIGHTS).expect("positive weights");
    let amount_dists: Vec<LogNormal<f64>> =
        LOG_AMOUNT.iter().map(|&mu| LogNormal::new(mu, AMOUNT_SIGMA).expect("valid")).collect();
    let balance_dist: LogNormal<f64> = LogNormal::new(11.0, 1.5).expect("valid");

    let mut steps: Vec<u32> = (0..n).map(|_| step_dist.sample(&mut rng) as u32 + 1).collect();
    steps.sort_unstable();
    let pool = (n / 8).max(1);

    let mut rows = Vec::with_capacity(n);
    for (i, step) in steps.into_iter().enumerate() {
        let t = type_dist.sample(&mut rng);
        let tx_type = TxType::ALL[t];
        let amount = (amount_dists[t].sample(&mut rng) * 100.0).round() / 100.0;
        let old_balance_orig = if rng.random_bool(0.3) { 0.0 } else { balance_dist.sample(&mut rng).round() };
        let new_balance_orig = match tx_type {
            TxType::CashIn => old_balance_orig + amount,
            _ => (old_balance_orig - amount).max(0.0),
        };
        let (name_dest, old_balance_dest) = if tx_type == TxType::Payment {
            (format!("M{}", rng.random_range(0..pool)), 0.0)
        } else {
            let b = if rng.random_bool(0.4) { 0.0 } else { balance_dist.sample(&mut rng).round() };
            (format!("C{}", rng.random_range(0..pool)), b)
        };
        let new_balance_dest = if tx_type == TxType::Payment { 0.0 } else { old_balance_dest + amount };
        rows.push(RawTransaction {
            step,
            tx_type,
            amount,
            name_orig: format!("C{}", 1_000_000 + i),
            old_balance_orig,
            new_balance_orig,
            name_dest,
            old_balance_dest,
            new_balance_dest,
            is_flagged_fraud: false,
            is_fraud: false,
        });
    }

    match planted_rule {
        None => {
            for r in &mut rows {
                r.is_fraud = rng.random_bool(fraud_rate);
            }
        }
        Some(rule) => {
            let features = engineer_features(&rows)?;
            let fuzzy = apply_fuzzifier(&fit_fuzzifier(&features)?, &features)?;
            let scores = evaluate_batch(rule, &fuzzy)?;
            for (r, s) in rows.iter_mut().zip(scores) {
                r.is_fraud = (s.get() >= 0.5) != rng.random_bool(LABEL_FLIP_RATE);
            }
        }
    }
    let frauds = rows.iter().filter(|r| r.is_fraud).count();
    Ok(SyntheticData { fraud_rate: frauds as f64 / n as f64, rows })
}
