use std::collections::{HashMap, VecDeque};

use super::{DataError, FeatureColumn, FeatureDataset, RawTransaction, TxType};

/// Engineered columns in output order.
pub const FEATURE_COLUMNS: [&str; 16] = [
    "amount",
    "derived_newbalanceDest",
    "derived_oldbalanceOrig",
    "hour_of_day",
    "day",
    "month",
    "is_workday",
    "type_CASH_IN",
    "type_CASH_OUT",
    "type_DEBIT",
    "type_PAYMENT",
    "type_TRANSFER",
    "avgDest3",
    "avgDest7",
    "maxDest3",
    "maxDest7",
];

/// Columns left out of the search library unless asked for. `month` is
/// constant over a one-month simulation.
pub const DEFAULT_EXCLUDED_FEATURES: [&str; 1] = ["month"];

const HOURS_PER_DAY: u32 = 24;
const HOURS_PER_MONTH: u32 = 744;
const WORKDAYS: usize = 5;

/// Builds the engineered feature matrix. Raw balances are consumed by the
/// derived columns and never emitted.
pub fn engineer_features(rows: &[RawTransaction]) -> Result<FeatureDataset, DataError> {
    if rows.is_empty() {
        return Err(DataError::Empty);
    }
    let n = rows.len();

    // Day-of-week volume ranking over the whole file.
    let mut dow_count = [0usize; 7];
    for r in rows {
        dow_count[((r.step / HOURS_PER_DAY) % 7) as usize] += 1;
    }
    let mut order: Vec<usize> = (0..7).collect();
    order.sort_by(|&a, &b| dow_count[b].cmp(&dow_count[a]).then(a.cmp(&b)));
    let mut workday = [false; 7];
    for &d in &order[..WORKDAYS] {
        workday[d] = true;
    }

    let (avg3, max3) = rolling(rows, 3);
    let (avg7, max7) = rolling(rows, 7);

    let col = |f: &dyn Fn(&RawTransaction) -> f64| -> Vec<f64> { rows.iter().map(f).collect() };
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    let mut columns = vec![
        FeatureColumn::continuous("amount", col(&|r| r.amount)),
        FeatureColumn::continuous("derived_newbalanceDest", col(&|r| r.old_balance_dest + r.amount)),
        FeatureColumn::continuous("derived_oldbalanceOrig", col(&|r| r.new_balance_orig + r.amount)),
        FeatureColumn::continuous("hour_of_day", col(&|r| f64::from(r.step % HOURS_PER_DAY))),
        FeatureColumn::continuous("day", col(&|r| f64::from((r.step / HOURS_PER_DAY) % 31))),
        FeatureColumn::continuous("month", col(&|r| f64::from(r.step / HOURS_PER_MONTH))),
        FeatureColumn::binary("is_workday", col(&|r| flag(workday[((r.step / HOURS_PER_DAY) % 7) as usize]))),
    ];
    for t in TxType::ALL {
        columns.push(FeatureColumn::binary(format!("type_{t}"), col(&|r| flag(r.tx_type == t))));
    }
    columns.push(FeatureColumn::continuous("avgDest3", avg3));
    columns.push(FeatureColumn::continuous("avgDest7", avg7));
    columns.push(FeatureColumn::continuous("maxDest3", max3));
    columns.push(FeatureColumn::continuous("maxDest7", max7));
    // Counters and amounts are nonnegative even when a column happens to be
    // all zero.
    for c in &mut columns {
        c.nonnegative = true;
    }
    debug_assert!(columns.iter().map(|c| c.name.as_str()).eq(FEATURE_COLUMNS));

    let labels = rows.iter().map(|r| r.is_fraud).collect();
    let ds = FeatureDataset::new(columns, labels)?;
    debug_assert_eq!(ds.n_rows(), n);
    Ok(ds)
}

/// Per-recipient mean and max over the last `window` transactions,
/// current one included, in (step, file position) order.
fn rolling(rows: &[RawTransaction], window: usize) -> (Vec<f64>, Vec<f64>) {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by_key(|&i| (rows[i].step, i));
    let mut history: HashMap<&str, VecDeque<f64>> = HashMap::new();
    let mut avg = vec![0.0; rows.len()];
    let mut max = vec![0.0; rows.len()];
    for i in order {
        let h = history.entry(rows[i].name_dest.as_str()).or_default();
        if h.len() == window {
            h.pop_front();
        }
        h.push_back(rows[i].amount);
        avg[i] = h.iter().sum::<f64>() / h.len() as f64;
        max[i] = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    }
    (avg, max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tx(step: u32, tx_type: TxType, amount: f64, dest: &str) -> RawTransaction {
        RawTransaction {
            step,
            tx_type,
            amount,
            name_orig: "C1".into(),
            old_balance_orig: 0.0,
            new_balance_orig: 5.0,
            name_dest: dest.into(),
            old_balance_dest: 50.0,
            new_balance_dest: 0.0,
            is_flagged_fraud: false,
            is_fraud: false,
        }
    }

    fn value(ds: &FeatureDataset, name: &str, row: usize) -> f64 {
        ds.column(name).unwrap().values[row]
    }

    #[test]
    fn derived_balances_and_time() {
        let ds = engineer_features(&[tx(50, TxType::Transfer, 100.0, "M")]).unwrap();
        assert_eq!(value(&ds, "derived_newbalanceDest", 0), 150.0);
        assert_eq!(value(&ds, "derived_oldbalanceOrig", 0), 105.0);
        assert_eq!(value(&ds, "hour_of_day", 0), 2.0);
        assert_eq!(value(&ds, "day", 0), 2.0);
        assert_eq!(value(&ds, "month", 0), 0.0);
        assert_eq!(value(&ds, "type_TRANSFER", 0), 1.0);
        assert_eq!(value(&ds, "type_PAYMENT", 0), 0.0);
    }

    #[test]
    fn raw_balances_dropped() {
        let ds = engineer_features(&[tx(1, TxType::Debit, 1.0, "M")]).unwrap();
        assert_eq!(ds.column_names(), FEATURE_COLUMNS);
        for raw in ["oldbalanceOrg", "newbalanceOrig", "oldbalanceDest", "newbalanceDest"] {
            assert!(ds.column(raw).is_none());
        }
    }

    #[test]
    fn rolling_windows() {
        let rows = [
            tx(3, TxType::Payment, 30.0, "D"),
            tx(1, TxType::Payment, 10.0, "D"),
            tx(2, TxType::Payment, 20.0, "D"),
            tx(2, TxType::Payment, 99.0, "E"),
        ];
        let ds = engineer_features(&rows).unwrap();
        assert_eq!(value(&ds, "maxDest3", 0), 30.0);
        assert_eq!(value(&ds, "avgDest3", 0), 20.0);
        assert_eq!(value(&ds, "maxDest7", 1), 10.0);
        assert_eq!(value(&ds, "avgDest7", 1), 10.0);
        assert_eq!(value(&ds, "avgDest3", 3), 99.0);
    }

    #[test]
    fn window_drops_oldest() {
        let rows: Vec<_> = (1..=4).map(|s| tx(s, TxType::CashOut, f64::from(s * 10), "D")).collect();
        let ds = engineer_features(&rows).unwrap();
        assert_eq!(value(&ds, "avgDest3", 3), 30.0);
        assert_eq!(value(&ds, "avgDest7", 3), 25.0);
    }

    #[test]
    fn top_five_days_are_workdays() {
        // Day-of-week d gets d + 1 transactions, so 2..=6 are the busiest.
        let mut rows = Vec::new();
        for d in 0..7u32 {
            for _ in 0..=d {
                rows.push(tx(d * 24 + 1, TxType::Payment, 1.0, "M"));
            }
        }
        let ds = engineer_features(&rows).unwrap();
        let wd = &ds.column("is_workday").unwrap().values;
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(wd[r] == 1.0, row.step / 24 >= 2);
        }
    }

    #[test]
    fn empty_input_rejected() {
        assert!(matches!(engineer_features(&[]), Err(DataError::Empty)));
    }

    proptest! {
        // Rolling features only look back in time, so shuffling file order
        // while keeping steps distinct cannot change any row's value.
        #[test]
        fn rolling_is_causal(amounts in prop::collection::vec((1u32..50, 0u8..3, 1.0f64..100.0), 1..40), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let rows: Vec<_> = amounts
                .iter()
                .enumerate()
                .map(|(i, &(_, d, a))| tx(i as u32 + 1, TxType::Payment, a, &format!("D{d}")))
                .collect();
            let base = engineer_features(&rows).unwrap();
            let mut perm: Vec<usize> = (0..rows.len()).collect();
            perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let shuffled: Vec<_> = perm.iter().map(|&i| rows[i].clone()).collect();
            let ds = engineer_features(&shuffled).unwrap();
            for name in ["avgDest3", "avgDest7", "maxDest3", "maxDest7"] {
                for (k, &i) in perm.iter().enumerate() {
                    prop_assert_eq!(value(&ds, name, k), value(&base, name, i));
                }
            }
            // The prefix up to any row fixes that row's value.
            for cut in 1..rows.len() {
                let prefix = engineer_features(&rows[..cut]).unwrap();
                prop_assert_eq!(value(&prefix, "maxDest7", cut - 1), value(&base, "maxDest7", cut - 1));
            }
        }
    }
}
