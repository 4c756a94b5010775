use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::DataError;
use crate::fuzzy::FuzzyValue;

/// Name of the label column in every CSV this crate writes.
pub const LABEL_COLUMN: &str = "isFraud";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    /// Real-valued; fuzzified through percentile bins.
    Continuous,
    /// 0/1 indicator; passes through fuzzification untouched.
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureColumn {
    pub name: String,
    pub kind: ColumnKind,
    /// Values can never be negative (amounts, balances, counters).
    pub nonnegative: bool,
    pub values: Vec<f64>,
}

impl FeatureColumn {
    pub fn continuous(name: impl Into<String>, values: Vec<f64>) -> Self {
        let nonnegative = values.iter().all(|&v| v >= 0.0);
        FeatureColumn { name: name.into(), kind: ColumnKind::Continuous, nonnegative, values }
    }

    pub fn binary(name: impl Into<String>, values: Vec<f64>) -> Self {
        FeatureColumn { name: name.into(), kind: ColumnKind::Binary, nonnegative: true, values }
    }

    /// Binary if every value is 0 or 1, continuous otherwise.
    pub fn inferred(name: impl Into<String>, values: Vec<f64>) -> Self {
        if !values.is_empty() && values.iter().all(|&v| v == 0.0 || v == 1.0) {
            Self::binary(name, values)
        } else {
            Self::continuous(name, values)
        }
    }
}

/// Crisp engineered features plus the fraud label.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDataset {
    columns: Vec<FeatureColumn>,
    labels: Vec<bool>,
}

impl FeatureDataset {
    pub fn new(columns: Vec<FeatureColumn>, labels: Vec<bool>) -> Result<Self, DataError> {
        let n = labels.len();
        for (ci, col) in columns.iter().enumerate() {
            if columns[..ci].iter().any(|c| c.name == col.name) {
                return Err(DataError::DuplicateColumn(col.name.clone()));
            }
            if col.values.len() != n {
                return Err(DataError::LengthMismatch { column: col.name.clone(), expected: n, got: col.values.len() });
            }
            for (row, &v) in col.values.iter().enumerate() {
                let bad = !v.is_finite()
                    || (col.kind == ColumnKind::Binary && v != 0.0 && v != 1.0)
                    || (col.nonnegative && v < 0.0);
                if bad {
                    return Err(DataError::InvalidValue { column: col.name.clone(), row, value: v });
                }
            }
        }
        Ok(FeatureDataset { columns, labels })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn columns(&self) -> &[FeatureColumn] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&FeatureColumn> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn n_positive(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    /// Rows at `indices`, in that order.
    pub fn take(&self, indices: &[usize]) -> FeatureDataset {
        let columns = self
            .columns
            .iter()
            .map(|c| FeatureColumn {
                name: c.name.clone(),
                kind: c.kind,
                nonnegative: c.nonnegative,
                values: indices.iter().map(|&i| c.values[i]).collect(),
            })
            .collect();
        FeatureDataset { columns, labels: indices.iter().map(|&i| self.labels[i]).collect() }
    }

    pub(crate) fn columns_mut(&mut self) -> &mut [FeatureColumn] {
        &mut self.columns
    }
}

/// Fuzzified feature matrix: every entry is a membership degree.
///
/// Stored column-major so expressions can be evaluated a column at a time.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyDataset {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    labels: Vec<bool>,
}

impl FuzzyDataset {
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>, labels: Vec<bool>) -> Result<Self, DataError> {
        if names.len() != columns.len() {
            return Err(DataError::ColumnMismatch(format!("{} names for {} columns", names.len(), columns.len())));
        }
        let n = labels.len();
        for (ci, (name, col)) in names.iter().zip(&columns).enumerate() {
            if names[..ci].contains(name) {
                return Err(DataError::DuplicateColumn(name.clone()));
            }
            if col.len() != n {
                return Err(DataError::LengthMismatch { column: name.clone(), expected: n, got: col.len() });
            }
            if let Some((row, &value)) = col.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
                return Err(DataError::InvalidValue { column: name.clone(), row, value });
            }
        }
        Ok(FuzzyDataset { names, columns, labels })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn column_names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn n_positive(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn row(&self, r: usize) -> Vec<FuzzyValue> {
        self.columns.iter().map(|c| FuzzyValue::saturating(c[r])).collect()
    }

    /// Projection onto `names`, in that order.
    pub fn select<S: AsRef<str>>(&self, names: &[S]) -> Result<FuzzyDataset, DataError> {
        let mut out_names = Vec::with_capacity(names.len());
        let mut out_cols = Vec::with_capacity(names.len());
        for name in names {
            let name = name.as_ref();
            let idx =
                self.names.iter().position(|n| n == name).ok_or_else(|| DataError::MissingColumn(name.to_string()))?;
            out_names.push(name.to_string());
            out_cols.push(self.columns[idx].clone());
        }
        FuzzyDataset::new(out_names, out_cols, self.labels.clone())
    }

    /// All columns except `excluded`.
    pub fn without<S: AsRef<str>>(&self, excluded: &[S]) -> FuzzyDataset {
        let keep: Vec<&String> =
            self.names.iter().filter(|n| !excluded.iter().any(|e| e.as_ref() == n.as_str())).collect();
        self.select(&keep).expect("names come from self")
    }

    /// Header of feature names plus [`LABEL_COLUMN`] last; labels as 0/1.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), DataError> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.names.iter().map(String::as_str).collect();
        header.push(LABEL_COLUMN);
        w.write_record(&header).map_err(csv_err)?;
        let mut record = Vec::with_capacity(header.len());
        for r in 0..self.n_rows() {
            record.clear();
            record.extend(self.columns.iter().map(|c| c[r].to_string()));
            record.push(if self.labels[r] { "1".into() } else { "0".into() });
            w.write_record(&record).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the [`FuzzyDataset::write_csv`] format back, validating every
    /// value.
    pub fn read_csv<R: Read>(reader: R) -> Result<FuzzyDataset, DataError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header = rdr.headers().map_err(csv_err)?.clone();
        let label_idx = header
            .iter()
            .position(|h| h == LABEL_COLUMN)
            .ok_or_else(|| DataError::MissingColumn(LABEL_COLUMN.to_string()))?;
        let names: Vec<String> =
            header.iter().enumerate().filter(|&(i, _)| i != label_idx).map(|(_, h)| h.to_string()).collect();
        let mut columns = vec![Vec::new(); names.len()];
        let mut labels = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(csv_err)?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() != header.len() {
                return Err(DataError::Row {
                    line,
                    message: format!("expected {} fields, got {}", header.len(), rec.len()),
                });
            }
            let mut ci = 0;
            for (i, field) in rec.iter().enumerate() {
                if i == label_idx {
                    labels.push(parse_flag(field, line, LABEL_COLUMN)?);
                    continue;
                }
                let v: f64 = field.trim().parse().map_err(|_| DataError::Parse {
                    line,
                    column: header[i].to_string(),
                    value: field.to_string(),
                })?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(DataError::Row { line, message: format!("{} = {v} outside [0, 1]", &header[i]) });
                }
                columns[ci].push(v);
                ci += 1;
            }
        }
        FuzzyDataset::new(names, columns, labels)
    }
}

pub(crate) fn parse_flag(field: &str, line: u64, column: &str) -> Result<bool, DataError> {
    match field.trim() {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(DataError::Parse { line, column: column.to_string(), value: other.to_string() }),
    }
}

pub(crate) fn csv_err(e: csv::Error) -> DataError {
    let line = e.position().map_or(0, |p| p.line());
    DataError::Csv { line, message: e.to_string() }
}
