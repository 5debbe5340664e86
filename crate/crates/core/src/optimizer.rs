//! Fitting the location parameters by Adam on loss plus curvature
//! regularization.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::interpolation;
use crate::math;
use crate::model::DtlModel;
use crate::point::PointSet;
use crate::regularizer;
use crate::triangulation::{build_delaunay, Triangulation};

/// Loss applied at the training points, where the interpolant equals the
/// location parameter directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LossKind {
    /// `(y - psi)^2` per point.
    SquaredError,
    /// `|y - psi|` per point, subgradient zero at ties.
    AbsoluteError,
    /// `exp(-y~ psi)` with labels `{0, 1}` mapped to `y~ in {-1, +1}`.
    ExponentialMargin,
}

/// Fit configuration. The Adam moment constants default to the standard
/// values beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8.
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub lambda: f64,
    pub loss: LossKind,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub step_size: f64,
    /// Convergence threshold on the parameter step norm; `None` selects
    /// `1e-6 * ||Y||`.
    pub eta: Option<f64>,
    pub max_iters: usize,
    /// Stationarity stop: iteration halts before updating when the
    /// max-norm of the gradient falls below `grad_tol * (1 + lambda)`, so
    /// exact stationary points (e.g. noiseless affine data) are returned
    /// unchanged. The scaling accounts for gradient rounding noise growing
    /// with the regularization weight.
    pub grad_tol: f64,
    /// Recorded for reproducibility metadata; the fit itself is
    /// deterministic.
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            loss: LossKind::SquaredError,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step_size: 0.01,
            eta: None,
            max_iters: 5000,
            grad_tol: 1e-9,
            seed: 0,
        }
    }
}

/// Mutable optimizer state, returned frozen after the fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitState {
    pub psi: Vec<f64>,
    /// First-moment estimate.
    pub m: Vec<f64>,
    /// Second-moment estimate, elementwise nonnegative.
    pub v: Vec<f64>,
    /// Number of Adam updates applied.
    pub t: usize,
    /// Objective value at initialization and after every update.
    pub objective_trace: Vec<f64>,
}

/// Total loss and its per-parameter gradient at the training points.
pub fn loss_value_and_grad(
    responses: &[f64],
    psi: &[f64],
    loss: LossKind,
) -> Result<(f64, Vec<f64>)> {
    if responses.len() != psi.len() {
        return Err(Error::InvalidInput("responses and parameters differ in length".to_string()));
    }
    if loss == LossKind::ExponentialMargin
        && responses.iter().any(|&y| y != 0.0 && y != 1.0)
    {
        return Err(Error::InvalidInput(
            "exponential loss requires labels in {0, 1}".to_string(),
        ));
    }
    let mut value = 0.0;
    let mut grad = vec![0.0; psi.len()];
    for (i, (&y, &f)) in responses.iter().zip(psi).enumerate() {
        match loss {
            LossKind::SquaredError => {
                let r = f - y;
                value += r * r;
                grad[i] = 2.0 * r;
            }
            LossKind::AbsoluteError => {
                let r = f - y;
                value += math::abs(r);
                grad[i] = if r > 0.0 {
                    1.0
                } else if r < 0.0 {
                    -1.0
                } else {
                    0.0
                };
            }
            LossKind::ExponentialMargin => {
                let label = if y == 1.0 { 1.0 } else { -1.0 };
                let e = math::exp(-label * f);
                value += e;
                grad[i] = -label * e;
            }
        }
    }
    Ok((value, grad))
}

fn objective(
    points: &PointSet,
    tri: &Triangulation,
    responses: &[f64],
    psi: &[f64],
    config: &FitConfig,
) -> Result<f64> {
    let (loss, _) = loss_value_and_grad(responses, psi, config.loss)?;
    if config.lambda == 0.0 {
        return Ok(loss);
    }
    let reg = regularizer::regularization_value(points, tri, psi)?.total;
    Ok(loss + config.lambda * reg)
}

/// Fits the location parameters: triangulates the points once, starts from
/// the responses, and iterates Adam on the objective gradient until the
/// step norm drops below eta, the gradient becomes stationary, or the
/// iteration budget runs out.
pub fn fit(
    points: &PointSet,
    responses: &[f64],
    config: &FitConfig,
) -> Result<(DtlModel, FitState)> {
    if responses.len() != points.len() {
        return Err(Error::InvalidInput("one response per point required".to_string()));
    }
    if responses.iter().any(|y| !y.is_finite()) {
        return Err(Error::InvalidInput("responses must be finite".to_string()));
    }
    if !(config.step_size > 0.0) {
        return Err(Error::InvalidInput("step size must be positive".to_string()));
    }
    if !(config.lambda >= 0.0) {
        return Err(Error::InvalidInput("lambda must be nonnegative".to_string()));
    }
    let tri = build_delaunay(points)?;
    let n = points.len();
    let eta = config.eta.unwrap_or_else(|| 1e-6 * math::norm(responses));

    let mut psi = responses.to_vec();
    let mut m = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut t = 0usize;
    let mut trace = Vec::with_capacity(config.max_iters + 1);
    trace.push(objective(points, &tri, responses, &psi, config)?);

    while t < config.max_iters {
        let (_, mut grad) = loss_value_and_grad(responses, &psi, config.loss)?;
        if config.lambda != 0.0 {
            let geos = interpolation::compute_geometry(points, &tri, &psi)?;
            let reg_grad = regularizer::gradient_from_geometry(points, &tri, &geos);
            for (g, r) in grad.iter_mut().zip(&reg_grad) {
                *g += config.lambda * r;
            }
        }
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteObjective(t + 1));
        }
        let grad_max = grad.iter().fold(0.0_f64, |a, &g| a.max(math::abs(g)));
        if grad_max <= config.grad_tol * (1.0 + config.lambda) {
            break;
        }
        t += 1;
        let bias1 = 1.0 - powi(config.beta1, t);
        let bias2 = 1.0 - powi(config.beta2, t);
        let mut step_sq = 0.0;
        for i in 0..n {
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * grad[i];
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
            let m_hat = m[i] / bias1;
            let v_hat = v[i] / bias2;
            let delta = config.step_size * m_hat / (math::sqrt(v_hat) + config.epsilon);
            psi[i] -= delta;
            step_sq += delta * delta;
        }
        let obj = objective(points, &tri, responses, &psi, config)?;
        if !obj.is_finite() {
            return Err(Error::NonFiniteObjective(t));
        }
        trace.push(obj);
        if math::sqrt(step_sq) <= eta {
            break;
        }
    }

    let state = FitState { psi: psi.clone(), m, v, t, objective_trace: trace };
    let model = DtlModel::new(
        points.clone(),
        responses.to_vec(),
        tri,
        psi,
        config.loss,
        config.lambda,
    )?;
    Ok((model, state))
}

fn powi(base: f64, exp: usize) -> f64 {
    let mut out = 1.0;
    let mut b = base;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            out *= b;
        }
        b *= b;
        e >>= 1;
    }
    out
}
