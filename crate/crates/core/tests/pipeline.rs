use fuzzy_dsr::data::{generate_synthetic, planted_rule, prepare, FuzzifierModel, FuzzyDataset, PrepareOptions};
use fuzzy_dsr::eval::{report, RowKind};
use fuzzy_dsr::expr::{evaluate_batch, parse, tree_from_traversal};
use fuzzy_dsr::trainer::{run_seed_sweep, train, TrainConfig};

fn planted(n: usize) -> fuzzy_dsr::data::Prepared {
    let syn = generate_synthetic(n, 0.0013, 1, Some(&planted_rule())).unwrap();
    prepare(&syn.rows, &PrepareOptions::default()).unwrap()
}

#[test]
fn learning_signal_on_planted_data() {
    let data = planted(5000);
    let cfg = TrainConfig { n_samples: 20_000, seed: 2, ..Default::default() };
    let r = train(&cfg, &data.train).unwrap();
    let curve: Vec<f64> = r.reward_curve.iter().map(|s| s.max_reward).collect();
    let q = curve.len() / 4;
    let head = curve[..q].iter().copied().fold(0.0, f64::max);
    let tail = curve[curve.len() - q..].iter().copied().fold(0.0, f64::max);
    assert!(tail >= head, "first quarter {head}, last quarter {tail}");
    assert!(r.best.reward >= 0.9, "{}", r.best.expression);

    for s in &r.reward_curve {
        assert!((0.0..=1.0).contains(&s.max_reward) && s.mean_reward <= s.max_reward);
        assert!(s.quantile <= s.max_reward && s.kept >= 25);
    }
    for e in &r.hall_of_fame {
        assert!((0.0..=1.0).contains(&e.reward));
        // The stored expression text parses back to the stored traversal.
        let lib = r.library().unwrap();
        let tree = tree_from_traversal(&e.traversal, &lib).unwrap();
        assert_eq!(parse(&e.expression, &lib).unwrap(), tree);
    }
}

#[test]
fn one_batch_one_update() {
    let data = planted(2000);
    let cfg = TrainConfig { n_samples: 500, ..Default::default() };
    let r = train(&cfg, &data.train).unwrap();
    assert_eq!(r.reward_curve.len(), 1);
    assert_eq!(r.n_updates, 1);
}

#[test]
fn sweep_means_over_seeds() {
    let data = planted(2000);
    let cfg = TrainConfig { n_samples: 200, batch_size: 50, hidden_size: 8, ..Default::default() };
    let seeds: Vec<u64> = (0..16).collect();
    let sweep = run_seed_sweep(&cfg, &data.train, &seeds).unwrap();
    assert_eq!(sweep.results.len(), 16);
    let f1 = sweep.results.iter().map(|r| r.best.metrics.f1).sum::<f64>() / 16.0;
    assert!((sweep.mean_best.f1 - f1).abs() < 1e-12);

    let rep = report(&sweep.results, &data.test, 0.5).unwrap();
    let avg = rep.rows.iter().find(|r| r.kind == RowKind::Average).unwrap();
    assert_eq!(avg.n_seeds, 16);
}

#[test]
fn prepared_artifacts_round_trip() {
    let data = planted(3000);
    let mut buf = Vec::new();
    data.test.write_csv(&mut buf).unwrap();
    let back = FuzzyDataset::read_csv(buf.as_slice()).unwrap();
    assert_eq!(back, data.test);
    assert_eq!(FuzzifierModel::from_json(&data.fuzzifier.to_json()).unwrap(), data.fuzzifier);

    // The planted rule, re-evaluated on clean test rows, agrees with most labels.
    let test = data.test.select(&fuzzy_dsr::data::FEATURE_COLUMNS).unwrap();
    let out = evaluate_batch(&planted_rule(), &test).unwrap();
    let agree = out.iter().zip(test.labels()).filter(|(v, &l)| (v.get() >= 0.5) == l).count();
    assert!(agree as f64 / test.n_rows() as f64 > 0.95, "{agree}");
}
