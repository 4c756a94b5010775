use serde::{Deserialize, Serialize};

use super::{ColumnKind, DataError, FeatureDataset, FuzzyDataset};

/// Membership degrees assigned to the five percentile bins.
pub const FUZZY_LEVELS: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];

const PERCENTILES: [f64; 4] = [20.0, 40.0, 60.0, 80.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ColumnModel {
    /// 20th/40th/60th/80th percentile of the training values.
    Fuzzy { cutpoints: [f64; 4] },
    /// Passed through unchanged.
    Binary,
}

impl ColumnModel {
    pub fn transform(&self, v: f64) -> f64 {
        match self {
            ColumnModel::Binary => v,
            ColumnModel::Fuzzy { cutpoints } => {
                let bin = cutpoints.iter().position(|&c| v <= c).unwrap_or(4);
                FUZZY_LEVELS[bin]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzifierModel {
    pub columns: Vec<(String, ColumnModel)>,
}

impl FuzzifierModel {
    pub fn get(&self, name: &str) -> Option<&ColumnModel> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    /// Parses and validates: cutpoints finite and non-decreasing, names
    /// unique.
    pub fn from_json(text: &str) -> Result<Self, DataError> {
        let model: FuzzifierModel = serde_json::from_str(text)?;
        for (i, (name, m)) in model.columns.iter().enumerate() {
            if model.columns[..i].iter().any(|(n, _)| n == name) {
                return Err(DataError::DuplicateColumn(name.clone()));
            }
            if let ColumnModel::Fuzzy { cutpoints } = m {
                if cutpoints.iter().any(|c| !c.is_finite()) || cutpoints.windows(2).any(|w| w[0] > w[1]) {
                    return Err(DataError::ColumnMismatch(format!("{name}: cutpoints must be finite and sorted")));
                }
            }
        }
        Ok(model)
    }
}

/// Nearest-rank percentile of sorted data: the value at rank ceil(p/100 * n).
fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let rank = ((p / 100.0) * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

pub fn fit_fuzzifier(train: &FeatureDataset) -> Result<FuzzifierModel, DataError> {
    if train.n_rows() == 0 {
        return Err(DataError::Empty);
    }
    let columns = train
        .columns()
        .iter()
        .map(|c| {
            let model = match c.kind {
                ColumnKind::Binary => ColumnModel::Binary,
                ColumnKind::Continuous => {
                    let mut sorted = c.values.clone();
                    sorted.sort_by(f64::total_cmp);
                    ColumnModel::Fuzzy { cutpoints: PERCENTILES.map(|p| nearest_rank(&sorted, p)) }
                }
            };
            (c.name.clone(), model)
        })
        .collect();
    Ok(FuzzifierModel { columns })
}

pub fn apply_fuzzifier(model: &FuzzifierModel, ds: &FeatureDataset) -> Result<FuzzyDataset, DataError> {
    let mut names = Vec::with_capacity(ds.columns().len());
    let mut columns = Vec::with_capacity(ds.columns().len());
    for c in ds.columns() {
        let m = model
            .get(&c.name)
            .ok_or_else(|| DataError::ColumnMismatch(format!("no fuzzifier for column {:?}", c.name)))?;
        if (*m == ColumnModel::Binary) != (c.kind == ColumnKind::Binary) {
            return Err(DataError::ColumnMismatch(format!("column {:?} kind differs from the fitted model", c.name)));
        }
        names.push(c.name.clone());
        columns.push(c.values.iter().map(|&v| m.transform(v)).collect());
    }
    FuzzyDataset::new(names, columns, ds.labels().to_vec())
}
