//! Empirical verification harness: geometric-loss comparisons, rate
//! checks, consistency and risk experiments.
//!
//! Every experiment is deterministic given its seed; independent draws use
//! separate ChaCha streams derived from the same seed.

mod datasets;

use alloc::string::ToString;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use datasets::{
    generate_dataset, DatasetKind, RiskGenerator, RiskSample, SmoothTarget,
};

use crate::error::{Error, Result};
use crate::linalg;
use crate::math;
use crate::optimizer::{fit, FitConfig, LossKind};
use crate::point::PointSet;
use crate::triangulation::{build_delaunay, random_triangulation, LocateResult, Triangulation};

fn stream(seed: u64, idx: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(idx);
    rng
}

/// Geometric loss of a query against a triangulation: the barycentric
/// combination of squared vertex distances over the covering simplex, and
/// zero outside the hull.
pub fn geometric_loss(points: &PointSet, tri: &Triangulation, query: &[f64]) -> Result<f64> {
    match tri.locate(points, query)? {
        LocateResult::InsideSimplex { simplex, barycentric } => {
            let verts = tri.simplex(simplex).vertex_ids();
            Ok(barycentric
                .iter()
                .zip(verts)
                .map(|(&l, &v)| l * math::dist_sq(points.point(v), query))
                .sum())
        }
        LocateResult::OutsideHull { .. } => Ok(0.0),
    }
}

/// Monte-Carlo comparison of the Delaunay geometric loss against random
/// alternative triangulations of the same points.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptimalityReport {
    pub n: usize,
    pub p: usize,
    pub num_queries: usize,
    pub num_alternatives: usize,
    pub flips_per_alternative: usize,
    pub seed: u64,
    pub mean_loss_delaunay: f64,
    /// Mean geometric loss of each alternative triangulation.
    pub mean_loss_alternatives: Vec<f64>,
    /// Count of (query, alternative) pairs where the Delaunay loss
    /// exceeded the alternative loss beyond tolerance.
    pub pointwise_violations: usize,
    /// Largest observed `delaunay - alternative` excess.
    pub max_excess: f64,
}

/// Draws uniform points and queries on `[0, 1]^p`, builds the Delaunay
/// mesh plus randomized alternatives, and compares the geometric loss
/// pointwise and in expectation.
pub fn optimality_experiment(
    n: usize,
    p: usize,
    num_queries: usize,
    num_alternatives: usize,
    seed: u64,
) -> Result<OptimalityReport> {
    let domain = alloc::vec![(0.0, 1.0); p];
    let mut rng = stream(seed, 0);
    let rows: Vec<Vec<f64>> =
        (0..n).map(|_| datasets::uniform_in(&mut rng, &domain)).collect();
    let points = PointSet::from_rows(&rows)?;
    let delaunay = build_delaunay(&points)?;

    let mut rng = stream(seed, 1);
    let queries: Vec<Vec<f64>> =
        (0..num_queries).map(|_| datasets::uniform_in(&mut rng, &domain)).collect();
    let delaunay_losses: Vec<f64> = queries
        .iter()
        .map(|q| geometric_loss(&points, &delaunay, q))
        .collect::<Result<_>>()?;

    let flips_per_alternative = 3 * n;
    let mut mean_loss_alternatives = Vec::with_capacity(num_alternatives);
    let mut pointwise_violations = 0usize;
    let mut max_excess = f64::NEG_INFINITY;
    for alt_idx in 0..num_alternatives {
        let alt = random_triangulation(&points, flips_per_alternative, seed ^ (alt_idx as u64 + 1))?;
        let mut total = 0.0;
        for (q, &dl) in queries.iter().zip(&delaunay_losses) {
            let al = geometric_loss(&points, &alt, q)?;
            total += al;
            let excess = dl - al;
            if excess > max_excess {
                max_excess = excess;
            }
            if excess > 1e-12 {
                pointwise_violations += 1;
            }
        }
        mean_loss_alternatives.push(total / num_queries as f64);
    }

    Ok(OptimalityReport {
        n,
        p,
        num_queries,
        num_alternatives,
        flips_per_alternative,
        seed,
        mean_loss_delaunay: delaunay_losses.iter().sum::<f64>() / num_queries as f64,
        mean_loss_alternatives,
        pointwise_violations,
        max_excess,
    })
}

/// Covering-edge-length decay across sample sizes, with the fitted
/// log-log slope.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingReport {
    pub p: usize,
    pub sample_sizes: Vec<usize>,
    pub queries_per_n: usize,
    pub seed: u64,
    /// Mean covering edge average at in-hull queries, one entry per size.
    pub mean_t: Vec<f64>,
    /// Least-squares slope of `ln(mean_t)` against `ln(n)`.
    pub fitted_slope: f64,
}

/// Estimates the expected covering edge average on uniform `[0, 1]^p`
/// samples at each size and fits the decay rate.
pub fn scaling_experiment(
    p: usize,
    sample_sizes: &[usize],
    queries_per_n: usize,
    seed: u64,
) -> Result<ScalingReport> {
    if sample_sizes.len() < 2 || sample_sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "sample sizes must be strictly increasing with at least two entries".to_string(),
        ));
    }
    let domain = alloc::vec![(0.0, 1.0); p];
    let mut mean_t = Vec::with_capacity(sample_sizes.len());
    for (idx, &n) in sample_sizes.iter().enumerate() {
        let mut rng = stream(seed, 2 * idx as u64);
        let rows: Vec<Vec<f64>> =
            (0..n).map(|_| datasets::uniform_in(&mut rng, &domain)).collect();
        let points = PointSet::from_rows(&rows)?;
        let tri = build_delaunay(&points)?;
        let mut rng = stream(seed, 2 * idx as u64 + 1);
        let mut total = 0.0;
        let mut accepted = 0usize;
        let mut attempts = 0usize;
        while accepted < queries_per_n && attempts < 1000 * queries_per_n {
            attempts += 1;
            let q = datasets::uniform_in(&mut rng, &domain);
            if !tri.hull_contains(&points, &q)? {
                continue;
            }
            total += tri.covering_edge_average(&points, &q)?;
            accepted += 1;
        }
        if accepted < queries_per_n {
            return Err(Error::InvalidInput("could not sample enough in-hull queries".to_string()));
        }
        mean_t.push(total / accepted as f64);
    }
    let log_n: Vec<f64> = sample_sizes.iter().map(|&n| math::ln(n as f64)).collect();
    let log_t: Vec<f64> = mean_t.iter().map(|&t| math::ln(t)).collect();
    Ok(ScalingReport {
        p,
        sample_sizes: sample_sizes.to_vec(),
        queries_per_n,
        seed,
        mean_t,
        fitted_slope: linalg::ls_slope(&log_n, &log_t),
    })
}

/// Held-out mean squared error against the true regression function, per
/// sample size.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConsistencyReport {
    pub kind: DatasetKind,
    pub noise: f64,
    pub lambda: f64,
    pub sample_sizes: Vec<usize>,
    pub n_test: usize,
    pub seed: u64,
    pub test_mse: Vec<f64>,
}

/// Fits the learner at each sample size and reports in-hull test MSE
/// against the noise-free target.
pub fn consistency_experiment(
    kind: DatasetKind,
    noise: f64,
    loss: LossKind,
    lambda: f64,
    sample_sizes: &[usize],
    seed: u64,
) -> Result<ConsistencyReport> {
    if kind.is_classification() {
        return Err(Error::InvalidInput(
            "consistency experiment needs a regression generator".to_string(),
        ));
    }
    let domain = kind.domain().unwrap();
    let n_test = 2000usize;
    let mut test_mse = Vec::with_capacity(sample_sizes.len());
    for (idx, &n) in sample_sizes.iter().enumerate() {
        let (points, responses) = generate_dataset(kind, n, noise, seed.wrapping_add(idx as u64))?;
        let config = FitConfig { lambda, loss, ..FitConfig::default() };
        let (model, _) = fit(&points, &responses, &config)?;
        let mut rng = stream(seed, 1000 + idx as u64);
        let mut total = 0.0;
        let mut accepted = 0usize;
        let mut attempts = 0usize;
        while accepted < n_test && attempts < 1000 * n_test {
            attempts += 1;
            let q = datasets::uniform_in(&mut rng, &domain);
            if !model.tri().hull_contains(model.points(), &q)? {
                continue;
            }
            let err = model.evaluate(&q)? - kind.true_value(&q).unwrap();
            total += err * err;
            accepted += 1;
        }
        test_mse.push(total / accepted as f64);
    }
    Ok(ConsistencyReport {
        kind,
        noise,
        lambda,
        sample_sizes: sample_sizes.to_vec(),
        n_test,
        seed,
        test_mse,
    })
}

/// Risk of the fitted classifier against the analytic Bayes bound.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RiskReport {
    /// Bayes risk, exact from the generator construction.
    pub bayes_risk: f64,
    /// Risk of the fitted classifier on held-out feature draws, averaged
    /// over the known conditional label distribution.
    pub empirical_dtl_risk: f64,
    /// The asymptotic bound `2 R_B (1 - R_B)`.
    pub bound: f64,
}

/// Risk experiment output: the bound comparison plus a nearest-neighbor
/// reference classifier evaluated the same way.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RiskExperimentReport {
    pub generator: RiskGenerator,
    pub n: usize,
    pub n_test: usize,
    pub lambda: f64,
    pub seed: u64,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub report: RiskReport,
    pub empirical_1nn_risk: f64,
}

/// Trains on one draw, classifies held-out points by thresholding the
/// interpolant at one half, and accumulates the exact conditional error of
/// each decision. Fits with squared loss, matching the classifier the
/// risk bound is stated for.
pub fn classification_risk_experiment(
    generator: RiskGenerator,
    n: usize,
    n_test: usize,
    lambda: f64,
    seed: u64,
) -> Result<RiskExperimentReport> {
    let train = generator.sample(n, &mut stream(seed, 0))?;
    let config = FitConfig { lambda, loss: LossKind::SquaredError, ..FitConfig::default() };
    let (model, _) = fit(&train.points, &train.labels, &config)?;

    let test = generator.sample(n_test, &mut stream(seed, 1))?;
    let mut dtl_risk = 0.0;
    let mut nn_risk = 0.0;
    for (x, &posterior) in test.points.iter().zip(&test.posteriors) {
        let dtl_label = model.evaluate(x)? > 0.5;
        dtl_risk += if dtl_label { 1.0 - posterior } else { posterior };
        let nn = train.points.nearest(x)?;
        let nn_label = train.labels[nn] > 0.5;
        nn_risk += if nn_label { 1.0 - posterior } else { posterior };
    }
    dtl_risk /= n_test as f64;
    nn_risk /= n_test as f64;

    let bayes_risk = generator.bayes_risk();
    Ok(RiskExperimentReport {
        generator,
        n,
        n_test,
        lambda,
        seed,
        report: RiskReport {
            bayes_risk,
            empirical_dtl_risk: dtl_risk,
            bound: 2.0 * bayes_risk * (1.0 - bayes_risk),
        },
        empirical_1nn_risk: nn_risk,
    })
}

/// Mean gradient error of the noiseless interpolant, per sample size.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdaptivityReport {
    pub kind: DatasetKind,
    pub sample_sizes: Vec<usize>,
    pub n_test: usize,
    pub seed: u64,
    pub mean_gradient_error: Vec<f64>,
}

/// Fits the noiseless interpolant (lambda zero) at each size and measures
/// the mean Euclidean distance between its gradient and the target's
/// gradient at interior test points (domain shrunk by a 20 percent margin,
/// facet points skipped).
pub fn local_adaptivity_experiment(
    kind: DatasetKind,
    sample_sizes: &[usize],
    seed: u64,
) -> Result<AdaptivityReport> {
    let Some(domain) = kind.domain() else {
        return Err(Error::InvalidInput(
            "adaptivity experiment needs a differentiable generator".to_string(),
        ));
    };
    let inner: Vec<(f64, f64)> = domain
        .iter()
        .map(|&(lo, hi)| {
            let margin = 0.2 * (hi - lo) / 2.0;
            (lo + margin, hi - margin)
        })
        .collect();
    let n_test = 400usize;
    let mut mean_gradient_error = Vec::with_capacity(sample_sizes.len());
    for (idx, &n) in sample_sizes.iter().enumerate() {
        let (points, responses) = generate_dataset(kind, n, 0.0, seed.wrapping_add(idx as u64))?;
        let (model, _) = fit(&points, &responses, &FitConfig::default())?;
        let mut rng = stream(seed, 2000 + idx as u64);
        let mut total = 0.0;
        let mut accepted = 0usize;
        let mut attempts = 0usize;
        while accepted < n_test && attempts < 1000 * n_test {
            attempts += 1;
            let q = datasets::uniform_in(&mut rng, &inner);
            let Ok(grad) = crate::interpolation::evaluate_gradient(&model, &q) else {
                continue;
            };
            let truth = kind.true_gradient(&q).unwrap();
            let err_sq: f64 =
                grad.iter().zip(&truth).map(|(a, b)| (a - b) * (a - b)).sum();
            total += math::sqrt(err_sq);
            accepted += 1;
        }
        if accepted == 0 {
            return Err(Error::InvalidInput("no interior test points found".to_string()));
        }
        mean_gradient_error.push(total / accepted as f64);
    }
    Ok(AdaptivityReport {
        kind,
        sample_sizes: sample_sizes.to_vec(),
        n_test,
        seed,
        mean_gradient_error,
    })
}

/// Monte-Carlo L2 error of the noiseless interpolant, per sample size.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InterpolationErrorReport {
    pub target: SmoothTarget,
    pub sample_sizes: Vec<usize>,
    pub n_test: usize,
    pub seed: u64,
    /// Root of the mean squared error over in-hull test points.
    pub l2_error: Vec<f64>,
}

/// Interpolates exact samples of a smooth target at each size and reports
/// the Monte-Carlo L2 error.
///
/// Test points are drawn from the domain shrunk by a 10 percent margin:
/// the thin boundary strip is dominated by sliver simplices whose error
/// decays slower than the interior rate, and at desk-scale sizes it would
/// mask the rate this experiment measures.
pub fn interpolation_error_experiment(
    target: SmoothTarget,
    sample_sizes: &[usize],
    seed: u64,
) -> Result<InterpolationErrorReport> {
    let domain = target.domain();
    let inner: Vec<(f64, f64)> = domain
        .iter()
        .map(|&(lo, hi)| {
            let margin = 0.1 * (hi - lo) / 2.0;
            (lo + margin, hi - margin)
        })
        .collect();
    let n_test = 3000usize;
    let mut l2_error = Vec::with_capacity(sample_sizes.len());
    for (idx, &n) in sample_sizes.iter().enumerate() {
        let mut rng = stream(seed, 3000 + idx as u64);
        let rows: Vec<Vec<f64>> =
            (0..n).map(|_| datasets::uniform_in(&mut rng, &domain)).collect();
        let points = PointSet::from_rows(&rows)?;
        let responses: Vec<f64> = points.iter().map(|x| target.value(x)).collect();
        let (model, _) = fit(&points, &responses, &FitConfig::default())?;
        let mut rng = stream(seed, 4000 + idx as u64);
        let mut total = 0.0;
        let mut accepted = 0usize;
        let mut attempts = 0usize;
        while accepted < n_test && attempts < 1000 * n_test {
            attempts += 1;
            let q = datasets::uniform_in(&mut rng, &inner);
            if !model.tri().hull_contains(model.points(), &q)? {
                continue;
            }
            let err = model.evaluate(&q)? - target.value(&q);
            total += err * err;
            accepted += 1;
        }
        l2_error.push(math::sqrt(total / accepted as f64));
    }
    Ok(InterpolationErrorReport {
        target,
        sample_sizes: sample_sizes.to_vec(),
        n_test,
        seed,
        l2_error,
    })
}
