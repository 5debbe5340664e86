//! Training feature storage.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// An immutable set of `n` points in `R^p`, stored row-major.
///
/// Every coordinate is finite; the ambient dimension is fixed at
/// construction and shared by all points.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    /// Builds a point set from a flat row-major coordinate buffer.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".to_string()));
        }
        if coords.is_empty() || coords.len() % dim != 0 {
            return Err(Error::InvalidInput(
                "coordinate buffer length must be a positive multiple of the dimension"
                    .to_string(),
            ));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("coordinates must be finite".to_string()));
        }
        Ok(Self { dim, coords })
    }

    /// Builds a point set from per-point coordinate rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidInput("ragged coordinate rows".to_string()));
        }
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            coords.extend_from_slice(r);
        }
        Self::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Coordinates of point `i`.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Flat row-major coordinate buffer.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Index of the point nearest to `query`, ties broken by lowest index.
    pub fn nearest(&self, query: &[f64]) -> Result<usize> {
        self.check_query(query)?;
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, pt) in self.iter().enumerate() {
            let d = crate::math::dist_sq(pt, query);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        Ok(best)
    }

    /// Rejects queries whose dimension differs from the ambient one.
    pub(crate) fn check_query(&self, query: &[f64]) -> Result<()> {
        if query.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: query.len() });
        }
        if query.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("query coordinates must be finite".to_string()));
        }
        Ok(())
    }
}
