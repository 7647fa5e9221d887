//! Feature matrix with binary labels, and CSV ingestion.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::stats::LabeledSample;

/// `n` observations of `p` features stored column-wise, plus binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetMatrix {
    columns: Vec<Vec<f64>>,
    labels: Vec<u8>,
    names: Vec<String>,
}

impl DatasetMatrix {
    pub fn new(columns: Vec<Vec<f64>>, labels: Vec<u8>, names: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptySample);
        }
        if columns.is_empty() {
            return Err(Error::Domain("dataset has no feature columns".into()));
        }
        if names.len() != columns.len() {
            return Err(Error::LengthMismatch {
                labels: names.len(),
                values: columns.len(),
            });
        }
        if let Some((index, &value)) = labels.iter().enumerate().find(|(_, &l)| l > 1) {
            return Err(Error::InvalidLabel { index, value });
        }
        for col in &columns {
            if col.len() != labels.len() {
                return Err(Error::LengthMismatch {
                    labels: labels.len(),
                    values: col.len(),
                });
            }
            if let Some(index) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteValue { index });
            }
        }
        Ok(Self {
            columns,
            labels,
            names,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn feature_sample(&self, j: usize) -> Result<LabeledSample> {
        LabeledSample::new(self.labels.clone(), self.columns[j].clone())
    }

    /// Rows `rows` (in the given order) of every column.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let columns = self
            .columns
            .iter()
            .map(|c| rows.iter().map(|&r| c[r]).collect())
            .collect();
        let labels = rows.iter().map(|&r| self.labels[r]).collect();
        Self::new(columns, labels, self.names.clone())
    }

    /// Writes a CSV with the label column first.
    pub fn write_csv<W: Write>(&self, out: W, label_column: &str) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![label_column.to_string()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header)?;
        let mut row = Vec::with_capacity(self.p() + 1);
        for i in 0..self.n() {
            row.clear();
            row.push(self.labels[i].to_string());
            row.extend(self.columns.iter().map(|c| c[i].to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads a delimited file with a header row. The `label_column` holds `0`/`1`
/// tokens; every other column is a numeric feature.
///
/// Row numbers in errors count the header as row 1.
pub fn ingest_csv(path: &Path, label_column: &str, delimiter: u8) -> Result<DatasetMatrix> {
    let file = std::fs::File::open(path)?;
    ingest_reader(file, label_column, delimiter)
}

pub fn ingest_reader<R: std::io::Read>(
    reader: R,
    label_column: &str,
    delimiter: u8,
) -> Result<DatasetMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    let label_idx = header
        .iter()
        .position(|h| h.trim() == label_column)
        .ok_or_else(|| Error::Parse {
            row: 1,
            column: label_column.to_string(),
            message: "label column not found".into(),
        })?;
    let mut feature_idx = Vec::new();
    let mut names = Vec::new();
    for (k, h) in header.iter().enumerate() {
        if k == label_idx {
            continue;
        }
        let name = h.trim();
        if name.is_empty() {
            return Err(Error::Parse {
                row: 1,
                column: format!("#{}", k + 1),
                message: "empty feature column header".into(),
            });
        }
        feature_idx.push(k);
        names.push(name.to_string());
    }
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); feature_idx.len()];
    let mut labels = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let row = r + 2;
        let token = record.get(label_idx).unwrap_or("").trim();
        let label = match token {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::Parse {
                    row,
                    column: label_column.to_string(),
                    message: format!("label '{other}' is not 0 or 1"),
                })
            }
        };
        labels.push(label);
        for (col, (&k, name)) in columns.iter_mut().zip(feature_idx.iter().zip(&names)) {
            let cell = record.get(k).unwrap_or("").trim();
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                column: name.clone(),
                message: format!("'{cell}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row,
                    column: name.clone(),
                    message: format!("'{cell}' is not finite"),
                });
            }
            col.push(v);
        }
    }
    DatasetMatrix::new(columns, labels, names)
}
