//! CSV matrix and label files, and the dataset metadata sidecar.
//!
//! Matrix files hold one feature per row and one observation per column. A
//! first row in which no cell parses as a number is treated as a header and
//! skipped. Values are written in scientific notation with 17 significant
//! digits, which round-trips every `f64` exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::datasets::DatasetMeta;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

fn format_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        msg: msg.into(),
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => format_err(path, format!("{other:?}")),
    }
}

fn parse_cell(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Reads the numeric grid as a list of rows. Positions in errors are
/// 1-based.
fn read_grid(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, e))?;
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        if r == 0 && record.iter().all(|c| parse_cell(c).is_none()) {
            continue;
        }
        let mut row = Vec::with_capacity(record.len());
        for (c, cell) in record.iter().enumerate() {
            row.push(parse_cell(cell).ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                row: r + 1,
                col: c + 1,
                cell: cell.to_string(),
            })?);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(format_err(
                    path,
                    format!("row {} has {} fields, expected {w}", r + 1, row.len()),
                ));
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(format_err(path, "no numeric rows"));
    }
    Ok(rows)
}

/// Loads a matrix; with `transpose` the file is read as one observation per
/// row.
pub fn load_matrix(path: impl AsRef<Path>, transpose: bool) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let rows = read_grid(path)?;
    let x = DenseMatrix::from_rows(&rows).map_err(|e| format_err(path, e.to_string()))?;
    Ok(if transpose { x.transpose() } else { x })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn save_matrix(x: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    for i in 0..x.rows() {
        let line = x
            .row(i)
            .iter()
            .map(|v| format!("{v:.16e}"))
            .collect::<Vec<_>>()
            .join(",");
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One label per line.
pub fn save_labels(labels: &[usize], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    for l in labels {
        writeln!(w, "{l}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads labels written one per line or as a single comma-separated row;
/// a non-numeric first line is skipped as a header.
pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut labels = Vec::new();
    for (r, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if r == 0 && cells.iter().all(|c| c.parse::<usize>().is_err()) {
            continue;
        }
        for (c, cell) in cells.iter().enumerate() {
            labels.push(cell.parse::<usize>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                row: r + 1,
                col: c + 1,
                cell: cell.to_string(),
            })?);
        }
    }
    if labels.is_empty() {
        return Err(format_err(path, "no labels"));
    }
    Ok(labels)
}

/// `key=value` lines: generator, seed, then the generator parameters.
pub fn save_metadata(meta: &DatasetMeta, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let mut put = |k: &str, v: &str| writeln!(w, "{k}={v}").map_err(|e| Error::io(path, e));
    put("generator", &meta.generator)?;
    put("seed", &meta.seed.to_string())?;
    for (k, v) in &meta.params {
        put(k, v)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
