//! Mesh export: OFF files for viewers and a JSON dump for any dimension.
//!
//! Surface export lifts each vertex by its fitted parameter, producing the
//! graph surface of the interpolant. OFF is limited to feature dimension 1
//! (lifted polyline) and 2 (lifted triangle surface); the JSON dump works
//! in any dimension.

use std::fs;
use std::path::Path;

use dtl_core::{DtlModel, PointSet, Triangulation};
use serde::{Deserialize, Serialize};

use super::{io_err, IoError, Result};

/// JSON mesh dump: plain vertex coordinates and simplex vertex lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshJson {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub simplices: Vec<Vec<usize>>,
}

fn lifted_vertices(model: &DtlModel) -> Vec<Vec<f64>> {
    model
        .points()
        .iter()
        .zip(model.psi())
        .map(|(x, &psi)| {
            let mut v = x.to_vec();
            v.push(psi);
            v
        })
        .collect()
}

/// Writes the lifted surface as OFF for p in `{1, 2}`.
pub fn write_surface_off(path: &Path, model: &DtlModel) -> Result<()> {
    let p = model.dim();
    if p > 2 {
        return Err(IoError::UnsupportedDimension(p));
    }
    let vertices = lifted_vertices(model);
    let simplices = model.tri().simplices();
    let mut out = String::from("OFF\n");
    out.push_str(&format!("{} {} 0\n", vertices.len(), simplices.len()));
    for v in &vertices {
        // pad 1-d lifted vertices (x, psi) to three coordinates
        let z = if p == 1 { 0.0 } else { v[2] };
        let y = v[1];
        out.push_str(&format!("{} {} {}\n", v[0], y, z));
    }
    for s in simplices {
        out.push_str(&format!("{}", s.vertex_ids().len()));
        for &v in s.vertex_ids() {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Writes the lifted surface as JSON for any dimension: vertices carry
/// `p + 1` coordinates, the last being the fitted parameter.
pub fn write_surface_json(path: &Path, model: &DtlModel) -> Result<()> {
    let mesh = MeshJson {
        dim: model.dim() + 1,
        vertices: lifted_vertices(model),
        simplices: model
            .tri()
            .simplices()
            .iter()
            .map(|s| s.vertex_ids().to_vec())
            .collect(),
    };
    write_mesh_json(path, &mesh)
}

/// Writes the flat triangulation itself as OFF for p in `{2, 3}`: the
/// triangles directly, or the deduplicated triangular faces of the
/// tetrahedra.
pub fn write_mesh_off(path: &Path, points: &PointSet, tri: &Triangulation) -> Result<()> {
    let p = points.dim();
    let faces: Vec<Vec<usize>> = match p {
        2 => tri.simplices().iter().map(|s| s.vertex_ids().to_vec()).collect(),
        3 => {
            let mut set = std::collections::BTreeSet::new();
            for s in tri.simplices() {
                let v = s.vertex_ids();
                for skip in 0..4 {
                    let mut face: Vec<usize> = v
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &x)| x)
                        .collect();
                    face.sort_unstable();
                    set.insert(face);
                }
            }
            set.into_iter().collect()
        }
        other => return Err(IoError::UnsupportedDimension(other)),
    };
    let mut out = String::from("OFF\n");
    out.push_str(&format!("{} {} 0\n", points.len(), faces.len()));
    for v in points.iter() {
        let z = if p == 2 { 0.0 } else { v[2] };
        out.push_str(&format!("{} {} {}\n", v[0], v[1], z));
    }
    for f in &faces {
        out.push_str(&format!("{}", f.len()));
        for &v in f {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn write_mesh_json(path: &Path, mesh: &MeshJson) -> Result<()> {
    let json = serde_json::to_string_pretty(mesh).expect("mesh serializes");
    fs::write(path, json + "\n").map_err(|e| io_err(path, e))
}

pub fn read_mesh_json(path: &Path) -> Result<MeshJson> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| IoError::Malformed {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Reads an OFF file back into vertices and faces, for round-trip checks.
pub fn read_off(path: &Path) -> Result<(Vec<Vec<f64>>, Vec<Vec<usize>>)> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let malformed = |message: &str| IoError::Malformed {
        path: path.to_path_buf(),
        message: message.to_string(),
    };
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some("OFF") {
        return Err(malformed("missing OFF header"));
    }
    let counts: Vec<usize> = lines
        .next()
        .ok_or_else(|| malformed("missing counts line"))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| malformed("bad counts line")))
        .collect::<Result<_>>()?;
    if counts.len() != 3 {
        return Err(malformed("counts line needs three entries"));
    }
    let mut vertices = Vec::with_capacity(counts[0]);
    for _ in 0..counts[0] {
        let line = lines.next().ok_or_else(|| malformed("truncated vertex list"))?;
        let v: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| malformed("bad vertex coordinate")))
            .collect::<Result<_>>()?;
        vertices.push(v);
    }
    let mut faces = Vec::with_capacity(counts[1]);
    for _ in 0..counts[1] {
        let line = lines.next().ok_or_else(|| malformed("truncated face list"))?;
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| malformed("bad face index")))
            .collect::<Result<_>>()?;
        let Some((&count, rest)) = nums.split_first() else {
            return Err(malformed("empty face line"));
        };
        if rest.len() != count {
            return Err(malformed("face vertex count mismatch"));
        }
        faces.push(rest.to_vec());
    }
    Ok((vertices, faces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use dtl_core::{fit, FitConfig};

    fn square_model() -> DtlModel {
        let pts = PointSet::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ])
        .unwrap();
        let (model, _) = fit(&pts, &[0.0, 1.0, 1.0, 2.0], &FitConfig::default()).unwrap();
        model
    }

    fn tmp_dir() -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("dtl-mesh-tests");
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn surface_off_square() {
        let model = square_model();
        let path = tmp_dir().join("square.off");
        write_surface_off(&path, &model).unwrap();
        let (vertices, faces) = read_off(&path).unwrap();
        assert_eq!(vertices.len(), 4);
        assert_eq!(faces.len(), 2);
        // lifted z equals psi
        assert_eq!(vertices[3], vec![1.0, 1.0, 2.0]);
        let expected: Vec<Vec<usize>> = model
            .tri()
            .simplices()
            .iter()
            .map(|s| s.vertex_ids().to_vec())
            .collect();
        assert_eq!(faces, expected);
    }

    #[test]
    fn off_rejects_high_dimension() {
        let rows: Vec<Vec<f64>> = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.3, 0.3, 0.3],
        ];
        let pts = PointSet::from_rows(&rows).unwrap();
        let (model, _) = fit(&pts, &[0.0; 5], &FitConfig::default()).unwrap();
        let path = tmp_dir().join("rejected.off");
        assert!(matches!(
            write_surface_off(&path, &model).unwrap_err(),
            IoError::UnsupportedDimension(3)
        ));
        // the flat-mesh exporter handles p = 3
        write_mesh_off(&path, model.points(), model.tri()).unwrap();
        let (v, f) = read_off(&path).unwrap();
        assert_eq!(v.len(), 5);
        assert!(!f.is_empty());
    }

    #[test]
    fn mesh_json_roundtrip() {
        let model = square_model();
        let path = tmp_dir().join("square.json");
        write_surface_json(&path, &model).unwrap();
        let mesh = read_mesh_json(&path).unwrap();
        assert_eq!(mesh.dim, 3);
        assert_eq!(mesh.vertices.len(), 4);
        assert_eq!(mesh.simplices.len(), 2);
        let path2 = tmp_dir().join("square2.json");
        write_mesh_json(&path2, &mesh).unwrap();
        assert_eq!(mesh, read_mesh_json(&path2).unwrap());
    }
}
