//! Patient record tables: PII removal and seeded attribute shuffling.
//!
//! Shuffling permutes each column independently: the column's values are
//! paired with random keys drawn from a stream derived from `(seed,
//! attribute name)` and rewritten in key order. Per-column multisets are
//! preserved exactly and the permutation of one column never depends on
//! another column's data.

use std::collections::BTreeSet;

use rand::Rng;
use thiserror::Error;

use crate::seeds;

/// Attribute names of the synthetic patient schema, in CSV column order.
pub const PATIENT_SCHEMA: [&str; 15] = [
    "Patient_ID",
    "First_Name",
    "Last_Name",
    "Gender",
    "SSN",
    "DOB",
    "Address",
    "City",
    "State",
    "Zipcode",
    "Country",
    "Diagnosis_Code",
    "Diagnosis_Description",
    "PCP",
    "DNA",
];

/// Attributes removed during PII sanitization.
pub const DEFAULT_PII_ATTRIBUTES: [&str; 5] =
    ["First_Name", "Last_Name", "SSN", "Address", "City"];

/// Attributes left untouched by shuffling.
pub const DEFAULT_EXCLUDED_ATTRIBUTES: [&str; 2] = ["Patient_ID", "DNA"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecordError {
    #[error("row {row} has {got} values, expected {expected}")]
    RaggedRow {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("duplicate attribute name {name:?}")]
    DuplicateAttribute { name: String },
    #[error("unknown attribute {name:?}")]
    UnknownAttribute { name: String },
    #[error("csv has no header row")]
    MissingHeader,
    #[error("malformed sequence reference {cell:?}: expected @file.fasta#record_id")]
    BadSequenceRef { cell: String },
    #[error("csv error: {0}")]
    Csv(String),
}

impl From<csv::Error> for RecordError {
    fn from(e: csv::Error) -> Self {
        RecordError::Csv(e.to_string())
    }
}

/// A rectangular table of string values with uniquely named columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordTable {
    attributes: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl RecordTable {
    pub fn new(attributes: Vec<String>, rows: Vec<Vec<String>>) -> Result<Self, RecordError> {
        let mut seen = BTreeSet::new();
        for name in &attributes {
            if !seen.insert(name.as_str()) {
                return Err(RecordError::DuplicateAttribute { name: name.clone() });
            }
        }
        for (idx, row) in rows.iter().enumerate() {
            if row.len() != attributes.len() {
                return Err(RecordError::RaggedRow {
                    row: idx + 1,
                    got: row.len(),
                    expected: attributes.len(),
                });
            }
        }
        Ok(RecordTable { attributes, rows })
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a == name)
    }

    /// All values of one column, in row order.
    pub fn column(&self, name: &str) -> Result<Vec<&str>, RecordError> {
        let idx = self
            .column_index(name)
            .ok_or_else(|| RecordError::UnknownAttribute {
                name: name.to_string(),
            })?;
        Ok(self.rows.iter().map(|r| r[idx].as_str()).collect())
    }

    /// Parse from CSV with a header row (RFC-4180 quoting).
    pub fn from_csv(text: &str) -> Result<Self, RecordError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let attributes: Vec<String> = reader
            .headers()
            .map_err(RecordError::from)?
            .iter()
            .map(str::to_string)
            .collect();
        if attributes.is_empty() || (attributes.len() == 1 && attributes[0].is_empty()) {
            return Err(RecordError::MissingHeader);
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(RecordError::from)?;
            rows.push(record.iter().map(str::to_string).collect());
        }
        RecordTable::new(attributes, rows)
    }

    /// Serialize to CSV: header plus rows, `\n` line ends, quoting only
    /// where needed.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
        writer
            .write_record(&self.attributes)
            .expect("in-memory write");
        for row in &self.rows {
            writer.write_record(row).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

/// Settings for PII removal and shuffling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShuffleConfig {
    pub seed: u64,
    /// Columns that keep their row order.
    pub excluded_attributes: BTreeSet<String>,
    /// Columns dropped by [`remove_pii`].
    pub pii_attributes: BTreeSet<String>,
}

impl ShuffleConfig {
    pub fn new(seed: u64) -> Self {
        ShuffleConfig {
            seed,
            excluded_attributes: DEFAULT_EXCLUDED_ATTRIBUTES
                .iter()
                .map(|s| s.to_string())
                .collect(),
            pii_attributes: DEFAULT_PII_ATTRIBUTES
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

fn check_known(
    names: &BTreeSet<String>,
    table: &RecordTable,
) -> Result<(), RecordError> {
    for name in names {
        if table.column_index(name).is_none() {
            return Err(RecordError::UnknownAttribute { name: name.clone() });
        }
    }
    Ok(())
}

/// Drop the configured PII columns; row order and all other values are
/// untouched.
pub fn remove_pii(table: &RecordTable, config: &ShuffleConfig) -> Result<RecordTable, RecordError> {
    check_known(&config.pii_attributes, table)?;
    let keep: Vec<usize> = (0..table.attributes.len())
        .filter(|&i| !config.pii_attributes.contains(&table.attributes[i]))
        .collect();
    let attributes = keep.iter().map(|&i| table.attributes[i].clone()).collect();
    let rows = table
        .rows
        .iter()
        .map(|row| keep.iter().map(|&i| row[i].clone()).collect())
        .collect();
    RecordTable::new(attributes, rows)
}

/// Shuffle every non-excluded column independently with a seeded
/// random-key sort. Ties in the keys keep original row order.
pub fn shuffle_attributes(
    table: &RecordTable,
    config: &ShuffleConfig,
) -> Result<RecordTable, RecordError> {
    check_known(&config.excluded_attributes, table)?;
    let n = table.n_rows();
    let mut rows = table.rows.clone();
    for (col, name) in table.attributes.iter().enumerate() {
        if config.excluded_attributes.contains(name) {
            continue;
        }
        let mut rng = seeds::rng_for(config.seed, &format!("column/{name}"));
        let keys: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| {
            keys[x]
                .partial_cmp(&keys[y])
                .expect("keys are never NaN")
                .then(x.cmp(&y))
        });
        let shuffled: Vec<String> = order.iter().map(|&i| table.rows[i][col].clone()).collect();
        for (row, value) in rows.iter_mut().zip(shuffled) {
            row[col] = value;
        }
    }
    RecordTable::new(table.attributes.clone(), rows)
}

/// A DNA cell holding `@file.fasta#record_id` instead of a literal sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastaRef {
    pub path: String,
    pub record_id: String,
}

impl FastaRef {
    /// `Ok(None)` for literal cells; `Err` for `@` cells missing the
    /// `#record_id` part.
    pub fn parse(cell: &str) -> Result<Option<FastaRef>, RecordError> {
        let Some(body) = cell.strip_prefix('@') else {
            return Ok(None);
        };
        let bad = || RecordError::BadSequenceRef {
            cell: cell.to_string(),
        };
        let (path, record_id) = body.split_once('#').ok_or_else(bad)?;
        if path.is_empty() || record_id.is_empty() {
            return Err(bad());
        }
        Ok(Some(FastaRef {
            path: path.to_string(),
            record_id: record_id.to_string(),
        }))
    }
}
