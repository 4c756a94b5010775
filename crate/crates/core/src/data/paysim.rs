//! PaySim transaction schema and CSV ingestion.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::dataset::{csv_err, parse_flag};
use super::DataError;

pub const PAYSIM_HEADER: [&str; 11] = [
    "step",
    "type",
    "amount",
    "nameOrig",
    "oldbalanceOrg",
    "newbalanceOrig",
    "nameDest",
    "oldbalanceDest",
    "newbalanceDest",
    "isFlaggedFraud",
    "isFraud",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TxType {
    CashIn,
    CashOut,
    Debit,
    Payment,
    Transfer,
}

impl TxType {
    pub const ALL: [TxType; 5] = [TxType::CashIn, TxType::CashOut, TxType::Debit, TxType::Payment, TxType::Transfer];

    pub fn as_str(self) -> &'static str {
        match self {
            TxType::CashIn => "CASH_IN",
            TxType::CashOut => "CASH_OUT",
            TxType::Debit => "DEBIT",
            TxType::Payment => "PAYMENT",
            TxType::Transfer => "TRANSFER",
        }
    }
}

impl fmt::Display for TxType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TxType {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        TxType::ALL.into_iter().find(|t| t.as_str() == s).ok_or(())
    }
}

/// One row of the PaySim simulator output.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTransaction {
    /// Hours since simulation start, from 1.
    pub step: u32,
    pub tx_type: TxType,
    pub amount: f64,
    pub name_orig: String,
    pub old_balance_orig: f64,
    pub new_balance_orig: f64,
    pub name_dest: String,
    pub old_balance_dest: f64,
    pub new_balance_dest: f64,
    pub is_flagged_fraud: bool,
    pub is_fraud: bool,
}

pub fn load_paysim_csv(path: impl AsRef<Path>) -> Result<Vec<RawTransaction>, DataError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| DataError::Open { path: path.display().to_string(), source: e })?;
    read_paysim_csv(file)
}

/// Reads PaySim rows. Column order is free and extra columns are ignored;
/// every error carries the 1-based line it was found on.
pub fn read_paysim_csv<R: Read>(reader: R) -> Result<Vec<RawTransaction>, DataError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers().map_err(csv_err)?.clone();
    let mut idx = [0usize; 11];
    for (slot, name) in idx.iter_mut().zip(PAYSIM_HEADER) {
        *slot =
            header.iter().position(|h| h.trim() == name).ok_or_else(|| DataError::MissingColumn(name.to_string()))?;
    }

    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |k: usize| rec.get(idx[k]).unwrap_or("").trim();
        let number = |k: usize| -> Result<f64, DataError> {
            let raw = field(k);
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
                _ => Err(DataError::Parse { line, column: PAYSIM_HEADER[k].to_string(), value: raw.to_string() }),
            }
        };

        let step = match field(0).parse::<u32>() {
            Ok(s) if s >= 1 => s,
            _ => {
                return Err(DataError::Parse { line, column: "step".into(), value: field(0).to_string() });
            }
        };
        let tx_type =
            field(1).parse::<TxType>().map_err(|_| DataError::UnknownType { line, value: field(1).to_string() })?;
        rows.push(RawTransaction {
            step,
            tx_type,
            amount: number(2)?,
            name_orig: field(3).to_string(),
            old_balance_orig: number(4)?,
            new_balance_orig: number(5)?,
            name_dest: field(6).to_string(),
            old_balance_dest: number(7)?,
            new_balance_dest: number(8)?,
            is_flagged_fraud: parse_flag(field(9), line, PAYSIM_HEADER[9])?,
            is_fraud: parse_flag(field(10), line, PAYSIM_HEADER[10])?,
        });
    }
    Ok(rows)
}

pub fn write_paysim_csv<W: Write>(rows: &[RawTransaction], writer: W) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(PAYSIM_HEADER).map_err(csv_err)?;
    let flag = |b: bool| if b { "1" } else { "0" };
    for r in rows {
        w.write_record([
            r.step.to_string().as_str(),
            r.tx_type.as_str(),
            &r.amount.to_string(),
            &r.name_orig,
            &r.old_balance_orig.to_string(),
            &r.new_balance_orig.to_string(),
            &r.name_dest,
            &r.old_balance_dest.to_string(),
            &r.new_balance_dest.to_string(),
            flag(r.is_flagged_fraud),
            flag(r.is_fraud),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
