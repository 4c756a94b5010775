//! Transaction ingestion, feature engineering and fuzzification.

mod dataset;
mod features;
mod fuzzify;
mod noise;
mod paysim;
mod split;
mod synth;

pub use dataset::{ColumnKind, FeatureColumn, FeatureDataset, FuzzyDataset, LABEL_COLUMN};
pub use features::{engineer_features, DEFAULT_EXCLUDED_FEATURES, FEATURE_COLUMNS};
pub use fuzzify::{apply_fuzzifier, fit_fuzzifier, ColumnModel, FuzzifierModel, FUZZY_LEVELS};
pub use noise::add_gaussian_noise;
pub use paysim::{load_paysim_csv, read_paysim_csv, write_paysim_csv, RawTransaction, TxType, PAYSIM_HEADER};
pub use split::stratified_split;
pub use synth::{generate_synthetic, planted_rule, SyntheticData, LABEL_FLIP_RATE};

use serde::{Deserialize, Serialize};

use crate::expr::ExprError;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("cannot open {path}: {source}")]
    Open { path: String, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("duplicate column {0:?}")]
    DuplicateColumn(String),
    #[error("column {column:?} has {got} values, expected {expected}")]
    LengthMismatch { column: String, expected: usize, got: usize },
    #[error("column {column:?} row {row}: invalid value {value}")]
    InvalidValue { column: String, row: usize, value: f64 },
    #[error("column mismatch: {0}")]
    ColumnMismatch(String),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("line {line}: cannot parse {column} value {value:?}")]
    Parse { line: u64, column: String, value: String },
    #[error("line {line}: unknown transaction type {value:?}")]
    UnknownType { line: u64, value: String },
    #[error("dataset is empty")]
    Empty,
    #[error("dataset contains only one class")]
    SingleClass,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("split leaves the {0} set empty")]
    EmptySplit(&'static str),
    #[error("invalid fuzzifier model: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Settings for [`prepare`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PrepareOptions {
    pub split_ratio: f64,
    pub split_seed: u64,
    pub noise_level: f64,
    pub noise_seed: u64,
}

impl Default for PrepareOptions {
    fn default() -> Self {
        PrepareOptions { split_ratio: 0.7, split_seed: 0, noise_level: 0.05, noise_seed: 0 }
    }
}

/// Output of [`prepare`]: fuzzified splits and the fitted model.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub train: FuzzyDataset,
    pub test: FuzzyDataset,
    pub fuzzifier: FuzzifierModel,
}

/// Engineer, split, perturb the training split, then fuzzify both splits
/// with cutpoints fitted on training rows only.
pub fn prepare(rows: &[RawTransaction], opts: &PrepareOptions) -> Result<Prepared, DataError> {
    let features = engineer_features(rows)?;
    let (train, test) = stratified_split(&features, opts.split_ratio, opts.split_seed)?;
    let train = add_gaussian_noise(&train, opts.noise_level, opts.noise_seed)?;
    let fuzzifier = fit_fuzzifier(&train)?;
    Ok(Prepared { train: apply_fuzzifier(&fuzzifier, &train)?, test: apply_fuzzifier(&fuzzifier, &test)?, fuzzifier })
}
