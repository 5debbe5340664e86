//! Synthetic dataset generators for the experiment harness.

use alloc::string::ToString;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::point::PointSet;

/// Built-in generators. The regression kinds carry a differentiable target
/// function; the classification kinds produce `{0, 1}` labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DatasetKind {
    /// `y = x1 * x2` on `[-1, 1]^2`, plus Gaussian response noise.
    Saddle,
    /// `y = arctan(x1 + x2)` on `[-1, 1]^2`, plus Gaussian response noise.
    ArcTan,
    /// `y = x1 + x2` on `[0, 1]^2`, plus Gaussian response noise.
    LinearPlane,
    /// Two interleaved half-annuli of radius 1, the second reflected and
    /// offset by `(1, -0.5)`; Gaussian coordinate jitter, labels `{0, 1}`.
    Moons,
    /// Two concentric circles of radii 1 and 0.5; Gaussian coordinate
    /// jitter, labels `{0, 1}`.
    Circles,
}

impl DatasetKind {
    /// Feature domain sampled by the regression kinds.
    pub fn domain(&self) -> Option<[(f64, f64); 2]> {
        match self {
            DatasetKind::Saddle | DatasetKind::ArcTan => Some([(-1.0, 1.0), (-1.0, 1.0)]),
            DatasetKind::LinearPlane => Some([(0.0, 1.0), (0.0, 1.0)]),
            _ => None,
        }
    }

    /// Noise-free regression target, `None` for the classification kinds.
    pub fn true_value(&self, x: &[f64]) -> Option<f64> {
        match self {
            DatasetKind::Saddle => Some(x[0] * x[1]),
            DatasetKind::ArcTan => Some(math::atan(x[0] + x[1])),
            DatasetKind::LinearPlane => Some(x[0] + x[1]),
            _ => None,
        }
    }

    /// Gradient of the regression target.
    pub fn true_gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        match self {
            DatasetKind::Saddle => Some(alloc::vec![x[1], x[0]]),
            DatasetKind::ArcTan => {
                let s = x[0] + x[1];
                let d = 1.0 / (1.0 + s * s);
                Some(alloc::vec![d, d])
            }
            DatasetKind::LinearPlane => Some(alloc::vec![1.0, 1.0]),
            _ => None,
        }
    }

    pub fn is_classification(&self) -> bool {
        matches!(self, DatasetKind::Moons | DatasetKind::Circles)
    }
}

/// Standard normal deviate by the Box-Muller transform.
pub(crate) fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    math::sqrt(-2.0 * math::ln(u1)) * math::cos(2.0 * core::f64::consts::PI * u2)
}

pub(crate) fn uniform_in<R: Rng>(rng: &mut R, domain: &[(f64, f64)]) -> Vec<f64> {
    domain.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.gen::<f64>()).collect()
}

/// Draws a dataset of `n` points; deterministic given the seed. For the
/// regression kinds `noise` is the response standard deviation, for the
/// classification kinds it is the coordinate jitter standard deviation.
pub fn generate_dataset(
    kind: DatasetKind,
    n: usize,
    noise: f64,
    seed: u64,
) -> Result<(PointSet, Vec<f64>)> {
    if n < 4 {
        return Err(Error::InvalidInput("need at least 4 points".to_string()));
    }
    if !(noise >= 0.0) {
        return Err(Error::InvalidInput("noise must be nonnegative".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        DatasetKind::Saddle | DatasetKind::ArcTan | DatasetKind::LinearPlane => {
            let domain = kind.domain().unwrap();
            let mut rows = Vec::with_capacity(n);
            let mut responses = Vec::with_capacity(n);
            for _ in 0..n {
                let x = uniform_in(&mut rng, &domain);
                let mut y = kind.true_value(&x).unwrap();
                if noise > 0.0 {
                    y += noise * standard_normal(&mut rng);
                }
                rows.push(x);
                responses.push(y);
            }
            Ok((PointSet::from_rows(&rows)?, responses))
        }
        DatasetKind::Moons => {
            let mut rows = Vec::with_capacity(n);
            let mut labels = Vec::with_capacity(n);
            for i in 0..n {
                let outer = i < n / 2 + n % 2;
                let (mut x, label) = moon_point(&mut rng, outer);
                if noise > 0.0 {
                    x[0] += noise * standard_normal(&mut rng);
                    x[1] += noise * standard_normal(&mut rng);
                }
                rows.push(x);
                labels.push(label);
            }
            Ok((PointSet::from_rows(&rows)?, labels))
        }
        DatasetKind::Circles => {
            let mut rows = Vec::with_capacity(n);
            let mut labels = Vec::with_capacity(n);
            for i in 0..n {
                let outer = i < n / 2 + n % 2;
                let (mut x, label) = circle_point(&mut rng, outer);
                if noise > 0.0 {
                    x[0] += noise * standard_normal(&mut rng);
                    x[1] += noise * standard_normal(&mut rng);
                }
                rows.push(x);
                labels.push(label);
            }
            Ok((PointSet::from_rows(&rows)?, labels))
        }
    }
}

pub(crate) fn moon_point<R: Rng>(rng: &mut R, outer: bool) -> (Vec<f64>, f64) {
    let t = core::f64::consts::PI * rng.gen::<f64>();
    if outer {
        (alloc::vec![math::cos(t), math::sin(t)], 0.0)
    } else {
        (alloc::vec![1.0 - math::cos(t), 0.5 - math::sin(t)], 1.0)
    }
}

pub(crate) fn circle_point<R: Rng>(rng: &mut R, outer: bool) -> (Vec<f64>, f64) {
    let t = 2.0 * core::f64::consts::PI * rng.gen::<f64>();
    let r = if outer { 1.0 } else { 0.5 };
    let label = if outer { 0.0 } else { 1.0 };
    (alloc::vec![r * math::cos(t), r * math::sin(t)], label)
}

/// Classification generators with an analytically known conditional
/// probability, used by the risk experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind"))]
pub enum RiskGenerator {
    /// Separable moons with each label flipped independently with
    /// probability `flip` (Bayes risk `flip`).
    MoonsFlip { flip: f64 },
    /// Separable circles with label flips (Bayes risk `flip`).
    CirclesFlip { flip: f64 },
    /// Pure coin-flip labels on `[0, 1]^2` (Bayes risk one half).
    ConstantHalf,
}

impl RiskGenerator {
    /// The minimal achievable misclassification probability, exact by
    /// construction.
    pub fn bayes_risk(&self) -> f64 {
        match self {
            RiskGenerator::MoonsFlip { flip } | RiskGenerator::CirclesFlip { flip } => {
                flip.min(1.0 - flip)
            }
            RiskGenerator::ConstantHalf => 0.5,
        }
    }

    /// Draws `n` samples: features, observed labels, and the conditional
    /// probability of label one at each feature.
    pub fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<RiskSample> {
        let mut rows = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        let mut posteriors = Vec::with_capacity(n);
        for i in 0..n {
            match self {
                RiskGenerator::MoonsFlip { flip } | RiskGenerator::CirclesFlip { flip } => {
                    if !(0.0..=0.5).contains(flip) {
                        return Err(Error::InvalidInput(
                            "flip rate must lie in [0, 0.5]".to_string(),
                        ));
                    }
                    let outer = i % 2 == 0;
                    let (x, base) = if matches!(self, RiskGenerator::MoonsFlip { .. }) {
                        moon_point(rng, outer)
                    } else {
                        circle_point(rng, outer)
                    };
                    let flipped = rng.gen::<f64>() < *flip;
                    let label = if flipped { 1.0 - base } else { base };
                    // the arcs are disjoint, so the generating arc is a
                    // function of x and the posterior is exactly flip-based
                    let posterior = if base == 1.0 { 1.0 - flip } else { *flip };
                    rows.push(x);
                    labels.push(label);
                    posteriors.push(posterior);
                }
                RiskGenerator::ConstantHalf => {
                    rows.push(alloc::vec![rng.gen::<f64>(), rng.gen::<f64>()]);
                    labels.push(f64::from(u8::from(rng.gen::<f64>() < 0.5)));
                    posteriors.push(0.5);
                }
            }
        }
        Ok(RiskSample { points: PointSet::from_rows(&rows)?, labels, posteriors })
    }
}

/// One draw from a [`RiskGenerator`].
pub struct RiskSample {
    pub points: PointSet,
    pub labels: Vec<f64>,
    pub posteriors: Vec<f64>,
}

/// Noise-free targets with bounded second derivative for the
/// interpolation-error experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SmoothTarget {
    /// `x1^2 + x2^2` on `[0, 1]^2`.
    QuadraticBowl,
    /// `x1 + x2` on `[0, 1]^2`.
    Affine,
    /// `x1 * x2` on `[-1, 1]^2`.
    Saddle,
}

impl SmoothTarget {
    pub fn domain(&self) -> [(f64, f64); 2] {
        match self {
            SmoothTarget::QuadraticBowl | SmoothTarget::Affine => [(0.0, 1.0), (0.0, 1.0)],
            SmoothTarget::Saddle => [(-1.0, 1.0), (-1.0, 1.0)],
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            SmoothTarget::QuadraticBowl => x[0] * x[0] + x[1] * x[1],
            SmoothTarget::Affine => x[0] + x[1],
            SmoothTarget::Saddle => x[0] * x[1],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saddle_and_plane_values() {
        assert_eq!(DatasetKind::Saddle.true_value(&[0.5, 0.5]), Some(0.25));
        assert_eq!(DatasetKind::LinearPlane.true_value(&[0.3, 0.4]), Some(0.7));
        assert_eq!(DatasetKind::Moons.true_value(&[0.0, 0.0]), None);
    }

    #[test]
    fn generators_are_deterministic() {
        let (a, ya) = generate_dataset(DatasetKind::Saddle, 50, 0.1, 7).unwrap();
        let (b, yb) = generate_dataset(DatasetKind::Saddle, 50, 0.1, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(ya, yb);
        let (c, _) = generate_dataset(DatasetKind::Saddle, 50, 0.1, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn noiseless_regression_matches_target() {
        let (pts, y) = generate_dataset(DatasetKind::ArcTan, 30, 0.0, 3).unwrap();
        for (x, &yi) in pts.iter().zip(&y) {
            assert_eq!(DatasetKind::ArcTan.true_value(x), Some(yi));
        }
    }

    #[test]
    fn moons_has_both_classes() {
        let (_, labels) = generate_dataset(DatasetKind::Moons, 200, 0.05, 11).unwrap();
        let ones = labels.iter().filter(|&&l| l == 1.0).count();
        assert!(ones > 0 && ones < labels.len());
        assert!(labels.iter().all(|&l| l == 0.0 || l == 1.0));
    }

    #[test]
    fn too_few_points_rejected() {
        assert!(generate_dataset(DatasetKind::Saddle, 3, 0.0, 1).is_err());
    }

    #[test]
    fn flip_rate_bayes_risk() {
        assert_eq!(RiskGenerator::MoonsFlip { flip: 0.1 }.bayes_risk(), 0.1);
        assert_eq!(RiskGenerator::ConstantHalf.bayes_risk(), 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = RiskGenerator::MoonsFlip { flip: 0.0 }.sample(100, &mut rng).unwrap();
        // without flips the labels equal the generating arc
        for (&l, &p) in s.labels.iter().zip(&s.posteriors) {
            assert_eq!(l, p);
        }
    }
}
