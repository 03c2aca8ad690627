//! CSV loading for observation matrices, group layouts, and edge lists.
//!
//! All three file kinds share one convention: a header row (whose content is
//! ignored except for arity), then data rows. Decimal points are `.`, the
//! separator is `,`. Errors carry the file path and the 1-based file line
//! (the header is line 1) plus the offending column where applicable.

use std::path::Path;

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::pairwise::{EdgeSet, GroupedDataset};

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => {
                let io_err = match e.into_kind() {
                    csv::ErrorKind::Io(io) => io,
                    _ => unreachable!("kind checked above"),
                };
                Error::Io {
                    path: path.display().to_string(),
                    source: io_err,
                }
            }
            _ => Error::Csv {
                path: path.display().to_string(),
                message: e.to_string(),
            },
        })
}

fn csv_error(path: &Path, message: String) -> Error {
    Error::Csv {
        path: path.display().to_string(),
        message,
    }
}

fn record_line(record: &csv::StringRecord, fallback: usize) -> usize {
    record
        .position()
        .map(|p| p.line() as usize)
        .unwrap_or(fallback)
}

/// Load a numeric observation matrix: a header row of column labels, then
/// one row per observation. Returns the matrix and the column labels.
pub fn load_matrix_csv(path: impl AsRef<Path>) -> Result<(DataMatrix, Vec<String>)> {
    let path = path.as_ref();
    let mut reader = open_reader(path)?;
    let labels: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if labels.is_empty() {
        return Err(csv_error(path, "header row has no columns".into()));
    }
    let p = labels.len();

    let mut flat: Vec<f64> = Vec::new();
    let mut n_rows = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e.to_string()))?;
        let line = record_line(&record, n_rows + 2);
        if record.len() != p {
            return Err(csv_error(
                path,
                format!(
                    "row at line {line} has {} fields, expected {p}",
                    record.len()
                ),
            ));
        }
        for (col, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                csv_error(
                    path,
                    format!(
                        "row at line {line}, column {}: `{field}` is not a number",
                        col + 1
                    ),
                )
            })?;
            if !value.is_finite() {
                return Err(csv_error(
                    path,
                    format!(
                        "row at line {line}, column {}: value `{field}` is not finite",
                        col + 1
                    ),
                ));
            }
            flat.push(value);
        }
        n_rows += 1;
    }
    if n_rows < 2 {
        return Err(Error::InsufficientObservations {
            message: format!(
                "matrix file {} needs at least 2 data rows",
                path.display()
            ),
            got: n_rows,
        });
    }
    Ok((DataMatrix::from_rows(n_rows, p, flat)?, labels))
}

/// Load a group layout: a header row, then `name,width` rows (widths are
/// positive integers). Order in the file is column order in the data.
pub fn load_layout_csv(path: impl AsRef<Path>) -> Result<Vec<(String, usize)>> {
    let path = path.as_ref();
    let mut reader = open_reader(path)?;
    let mut layout = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e.to_string()))?;
        let line = record_line(&record, layout.len() + 2);
        if record.len() != 2 {
            return Err(csv_error(
                path,
                format!(
                    "layout row at line {line} has {} fields, expected 2 (name,width)",
                    record.len()
                ),
            ));
        }
        let name = record[0].to_string();
        if name.is_empty() {
            return Err(csv_error(
                path,
                format!("layout row at line {line}: empty group name"),
            ));
        }
        let width: usize = record[1].parse().map_err(|_| {
            csv_error(
                path,
                format!(
                    "layout row at line {line}: width `{}` is not a positive integer",
                    &record[1]
                ),
            )
        })?;
        layout.push((name, width));
    }
    if layout.is_empty() {
        return Err(csv_error(path, "layout file has no group rows".into()));
    }
    Ok(layout)
}

/// Load a grouped dataset from a matrix file and a layout file; the layout's
/// widths must exactly cover the matrix columns.
pub fn load_grouped_csv(
    data_path: impl AsRef<Path>,
    layout_path: impl AsRef<Path>,
) -> Result<GroupedDataset> {
    let (data, _labels) = load_matrix_csv(data_path)?;
    let layout = load_layout_csv(layout_path)?;
    GroupedDataset::new(data, layout)
}

/// Load an edge list: a header row, then `name_a,name_b` rows. Pairs are
/// unordered; duplicates collapse; self-pairs are errors.
pub fn load_edges_csv(path: impl AsRef<Path>) -> Result<EdgeSet> {
    let path = path.as_ref();
    let mut reader = open_reader(path)?;
    let mut edges = EdgeSet::default();
    let mut rows = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e.to_string()))?;
        let line = record_line(&record, rows + 2);
        if record.len() != 2 {
            return Err(csv_error(
                path,
                format!(
                    "edge row at line {line} has {} fields, expected 2",
                    record.len()
                ),
            ));
        }
        if record[0].is_empty() || record[1].is_empty() {
            return Err(csv_error(
                path,
                format!("edge row at line {line}: empty group name"),
            ));
        }
        edges
            .insert(&record[0], &record[1])
            .map_err(|e| csv_error(path, format!("edge row at line {line}: {e}")))?;
        rows += 1;
    }
    Ok(edges)
}
