//! Model persistence: a versioned JSON schema carrying points, responses,
//! simplices, parameters and the fit configuration. Floats serialize at
//! full round-trip precision, so reloading preserves predictions exactly.

use std::fs;
use std::path::Path;

use dtl_core::{DtlModel, LossKind, PointSet, Triangulation};
use serde::{Deserialize, Serialize};

use super::{io_err, IoError, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    library_version: String,
    dim: usize,
    points: Vec<Vec<f64>>,
    responses: Vec<f64>,
    simplices: Vec<Vec<usize>>,
    psi: Vec<f64>,
    loss: String,
    lambda: f64,
}

pub(crate) fn loss_to_str(loss: LossKind) -> &'static str {
    match loss {
        LossKind::SquaredError => "squared",
        LossKind::AbsoluteError => "absolute",
        LossKind::ExponentialMargin => "exponential",
    }
}

pub(crate) fn loss_from_str(s: &str) -> Option<LossKind> {
    match s {
        "squared" => Some(LossKind::SquaredError),
        "absolute" => Some(LossKind::AbsoluteError),
        "exponential" => Some(LossKind::ExponentialMargin),
        _ => None,
    }
}

/// Saves a fitted model as pretty-printed JSON.
pub fn save_model(path: &Path, model: &DtlModel) -> Result<()> {
    let file = ModelFile {
        format_version: FORMAT_VERSION,
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        dim: model.dim(),
        points: model.points().iter().map(|p| p.to_vec()).collect(),
        responses: model.responses().to_vec(),
        simplices: model
            .tri()
            .simplices()
            .iter()
            .map(|s| s.vertex_ids().to_vec())
            .collect(),
        psi: model.psi().to_vec(),
        loss: loss_to_str(model.loss()).to_string(),
        lambda: model.lambda(),
    };
    let json = serde_json::to_string_pretty(&file).expect("model serializes");
    fs::write(path, json + "\n").map_err(|e| io_err(path, e))
}

/// Loads a model, rebuilding the triangulation tables from the stored
/// simplices.
pub fn load_model(path: &Path) -> Result<DtlModel> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let file: ModelFile = serde_json::from_str(&text).map_err(|e| IoError::Malformed {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if file.format_version != FORMAT_VERSION {
        return Err(IoError::FormatVersion {
            path: path.to_path_buf(),
            found: file.format_version,
            expected: FORMAT_VERSION,
        });
    }
    let loss = loss_from_str(&file.loss).ok_or_else(|| IoError::Malformed {
        path: path.to_path_buf(),
        message: format!("unknown loss '{}'", file.loss),
    })?;
    let points = PointSet::from_rows(&file.points)?;
    let tri = Triangulation::from_simplices(&points, file.simplices)?;
    Ok(DtlModel::new(points, file.responses, tri, file.psi, loss, file.lambda)?)
}
