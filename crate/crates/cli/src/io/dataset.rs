//! CSV datasets: a header naming `x1..xp` and `y`, then rows of decimal
//! floats. Comma-separated, no quoting, no locale handling.

use std::fs;
use std::path::Path;

use dtl_core::PointSet;

use super::{io_err, IoError, Result};

/// Reads a training dataset: feature columns `x1..xp` followed by one
/// response column `y`, mapped positionally, row order preserved.
pub fn read_dataset(path: &Path) -> Result<(PointSet, Vec<f64>)> {
    let (points, responses) = read_table(path, false)?;
    Ok((points, responses.expect("response column required")))
}

/// Reads query features: like a dataset, but the `y` column is optional
/// and ignored when present.
pub fn read_queries(path: &Path) -> Result<PointSet> {
    let (points, _) = read_table(path, true)?;
    Ok(points)
}

fn read_table(path: &Path, y_optional: bool) -> Result<(PointSet, Option<Vec<f64>>)> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(IoError::EmptyDataset { path: path.to_path_buf() });
    };
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let has_y = columns.last() == Some(&"y");
    if !has_y && !y_optional {
        return Err(IoError::Parse {
            path: path.to_path_buf(),
            row: 1,
            col: columns.len(),
            message: "last column must be named 'y'".into(),
        });
    }
    let p = if has_y { columns.len() - 1 } else { columns.len() };
    if p == 0 {
        return Err(IoError::Parse {
            path: path.to_path_buf(),
            row: 1,
            col: 1,
            message: "no feature columns".into(),
        });
    }
    for (i, name) in columns.iter().take(p).enumerate() {
        let expected = format!("x{}", i + 1);
        if *name != expected {
            return Err(IoError::Parse {
                path: path.to_path_buf(),
                row: 1,
                col: i + 1,
                message: format!("expected column '{expected}', found '{name}'"),
            });
        }
    }

    let mut coords = Vec::new();
    let mut responses = Vec::new();
    let mut n = 0usize;
    for (line_idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let row = line_idx + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != columns.len() {
            return Err(IoError::Parse {
                path: path.to_path_buf(),
                row,
                col: cells.len(),
                message: format!("expected {} cells, found {}", columns.len(), cells.len()),
            });
        }
        for (col_idx, cell) in cells.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| IoError::Parse {
                path: path.to_path_buf(),
                row,
                col: col_idx + 1,
                message: format!("not a number: '{cell}'"),
            })?;
            if !value.is_finite() {
                return Err(IoError::Parse {
                    path: path.to_path_buf(),
                    row,
                    col: col_idx + 1,
                    message: format!("non-finite value: '{cell}'"),
                });
            }
            if col_idx < p {
                coords.push(value);
            } else if has_y {
                responses.push(value);
            }
        }
        n += 1;
    }
    if n == 0 {
        return Err(IoError::EmptyDataset { path: path.to_path_buf() });
    }
    let points = PointSet::new(p, coords)?;
    Ok((points, has_y.then_some(responses)))
}

/// Writes a dataset with full round-trip float precision.
pub fn write_dataset(path: &Path, points: &PointSet, responses: &[f64]) -> Result<()> {
    let mut out = String::new();
    for i in 0..points.dim() {
        out.push_str(&format!("x{},", i + 1));
    }
    out.push_str("y\n");
    for (pt, y) in points.iter().zip(responses) {
        for c in pt {
            out.push_str(&format!("{c},"));
        }
        out.push_str(&format!("{y}\n"));
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Writes predictions beside their query features.
pub fn write_predictions(path: &Path, queries: &PointSet, values: &[f64]) -> Result<()> {
    let mut out = String::new();
    for i in 0..queries.dim() {
        out.push_str(&format!("x{},", i + 1));
    }
    out.push_str("prediction\n");
    for (pt, v) in queries.iter().zip(values) {
        for c in pt {
            out.push_str(&format!("{c},"));
        }
        out.push_str(&format!("{v}\n"));
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}
