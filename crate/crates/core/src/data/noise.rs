use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{ColumnKind, DataError, FeatureDataset};

/// Adds N(0, (level * std)^2) to every continuous column, where std is the
/// column's population standard deviation. Binary columns and labels are
/// untouched; nonnegative columns are floored at 0.
pub fn add_gaussian_noise(ds: &FeatureDataset, level: f64, seed: u64) -> Result<FeatureDataset, DataError> {
    if !(level >= 0.0 && level.is_finite()) {
        return Err(DataError::InvalidParameter(format!("noise level must be >= 0, got {level}")));
    }
    let mut out = ds.clone();
    if level == 0.0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for col in out.columns_mut() {
        if col.kind == ColumnKind::Binary || col.values.is_empty() {
            continue;
        }
        let n = col.values.len() as f64;
        let mean = col.values.iter().sum::<f64>() / n;
        let var = col.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let sd = level * var.sqrt();
        if sd == 0.0 {
            continue;
        }
        let normal = Normal::new(0.0, sd).expect("finite positive sd");
        for v in &mut col.values {
            *v += normal.sample(&mut rng);
            if col.nonnegative && *v < 0.0 {
                *v = 0.0;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::FeatureColumn;
    use rand::Rng;

    fn ds(values: Vec<f64>) -> FeatureDataset {
        let n = values.len();
        let flags = (0..n).map(|i| (i % 2) as f64).collect();
        FeatureDataset::new(
            vec![FeatureColumn::continuous("x", values), FeatureColumn::binary("b", flags)],
            vec![false; n],
        )
        .unwrap()
    }

    #[test]
    fn zero_level_is_identity() {
        let d = ds(vec![1.0, 2.0, 3.0]);
        assert_eq!(add_gaussian_noise(&d, 0.0, 1).unwrap(), d);
    }

    #[test]
    fn constant_column_unchanged() {
        let d = ds(vec![4.0; 50]);
        assert_eq!(add_gaussian_noise(&d, 0.05, 1).unwrap(), d);
    }

    #[test]
    fn perturbation_scale() {
        // Unit-std column: +-1 alternating, mean 0, population std 1.
        let values: Vec<f64> = (0..10_000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let mut col = FeatureColumn::continuous("x", values.clone());
        col.nonnegative = false;
        let d = FeatureDataset::new(vec![col], vec![false; values.len()]).unwrap();
        let noisy = add_gaussian_noise(&d, 0.05, 7).unwrap();
        let diffs: Vec<f64> = noisy.columns()[0].values.iter().zip(&values).map(|(a, b)| a - b).collect();
        let m = diffs.iter().sum::<f64>() / diffs.len() as f64;
        let sd = (diffs.iter().map(|d| (d - m).powi(2)).sum::<f64>() / diffs.len() as f64).sqrt();
        assert!((0.045..=0.055).contains(&sd), "sd {sd}");
    }

    #[test]
    fn binary_labels_untouched_and_floor_applied() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let values: Vec<f64> = (0..500).map(|_| rng.random_range(0.0..0.01)).chain([1000.0]).collect();
        let d = ds(values);
        let noisy = add_gaussian_noise(&d, 1.0, 3).unwrap();
        assert_eq!(noisy.columns()[1], d.columns()[1]);
        assert_eq!(noisy.labels(), d.labels());
        assert!(noisy.columns()[0].values.iter().all(|&v| v >= 0.0));
        assert_eq!(add_gaussian_noise(&d, 0.05, 9).unwrap(), add_gaussian_noise(&d, 0.05, 9).unwrap());
    }

    #[test]
    fn negative_level_rejected() {
        assert!(add_gaussian_noise(&ds(vec![1.0]), -0.1, 0).is_err());
    }
}
