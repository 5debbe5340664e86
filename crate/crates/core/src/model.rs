//! The frozen, immutable bundle produced by a fit and consumed by
//! prediction.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::interpolation;
use crate::optimizer::LossKind;
use crate::point::PointSet;
use crate::triangulation::Triangulation;

/// A fitted piecewise-linear model: training data, Delaunay mesh, location
/// parameters and the fit configuration that produced them.
///
/// Immutable; safe to share across threads for prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct DtlModel {
    points: PointSet,
    responses: Vec<f64>,
    tri: Triangulation,
    psi: Vec<f64>,
    loss: LossKind,
    lambda: f64,
}

impl DtlModel {
    /// Assembles a model from parts, validating the cross-invariants.
    pub fn new(
        points: PointSet,
        responses: Vec<f64>,
        tri: Triangulation,
        psi: Vec<f64>,
        loss: LossKind,
        lambda: f64,
    ) -> Result<Self> {
        if responses.len() != points.len() || psi.len() != points.len() {
            return Err(Error::InvalidInput(
                "responses and parameters must have one entry per point".to_string(),
            ));
        }
        if tri.n_points() != points.len() || tri.dim() != points.dim() {
            return Err(Error::InvalidInput(
                "triangulation does not match the point set".to_string(),
            ));
        }
        if psi.iter().any(|x| !x.is_finite()) || responses.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite values".to_string()));
        }
        if !(lambda >= 0.0) {
            return Err(Error::InvalidInput("lambda must be nonnegative".to_string()));
        }
        Ok(Self { points, responses, tri, psi, loss, lambda })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    pub fn tri(&self) -> &Triangulation {
        &self.tri
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn loss(&self) -> LossKind {
        self.loss
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    /// Interpolant value at one query.
    pub fn evaluate(&self, query: &[f64]) -> Result<f64> {
        interpolation::evaluate(self, query)
    }

    /// Interpolant values at many queries.
    pub fn predict(&self, queries: &PointSet) -> Result<Vec<f64>> {
        if queries.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: queries.dim() });
        }
        queries.iter().map(|q| self.evaluate(q)).collect()
    }

    /// Hard labels by thresholding the interpolant strictly above one half.
    pub fn classify(&self, queries: &PointSet) -> Result<Vec<u8>> {
        Ok(self.predict(queries)?.into_iter().map(|v| u8::from(v > 0.5)).collect())
    }
}
