use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DataError, FeatureDataset};

/// Shuffles each class with `seed` and sends round(ratio * class size) rows
/// of it to train. Rows keep their original relative order within a split.
pub fn stratified_split(
    ds: &FeatureDataset,
    ratio: f64,
    seed: u64,
) -> Result<(FeatureDataset, FeatureDataset), DataError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        let side = if ratio >= 1.0 { "test" } else { "train" };
        if ratio.is_finite() && (0.0..=1.0).contains(&ratio) {
            return Err(DataError::EmptySplit(side));
        }
        return Err(DataError::InvalidParameter(format!("split ratio must be in (0, 1), got {ratio}")));
    }
    let mut pos: Vec<usize> = (0..ds.n_rows()).filter(|&i| ds.labels()[i]).collect();
    let mut neg: Vec<usize> = (0..ds.n_rows()).filter(|&i| !ds.labels()[i]).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(DataError::SingleClass);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [&mut pos, &mut neg] {
        class.shuffle(&mut rng);
        let k = (ratio * class.len() as f64).round() as usize;
        train.extend_from_slice(&class[..k]);
        test.extend_from_slice(&class[k..]);
    }
    if train.is_empty() {
        return Err(DataError::EmptySplit("train"));
    }
    if test.is_empty() {
        return Err(DataError::EmptySplit("test"));
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.take(&train), ds.take(&test)))
}
