//! Total-discrete-curvature regularization and its analytic gradient with
//! respect to the location parameters.
//!
//! Each vertex contributes one minus the average pairwise inner product of
//! the up-norm vectors of its incident simplices. The optimizer uses this
//! smooth cosine form; the averaged pairwise angle is also reported as a
//! diagnostic.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::interpolation::{self, SimplexGeometry};
use crate::math;
use crate::point::PointSet;
use crate::triangulation::Triangulation;

/// Curvature of a fitted surface, per vertex and in total.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurvatureReport {
    /// Cosine-form contribution of each vertex; zero when all incident
    /// up-norms coincide or when the vertex has a single incident simplex.
    pub per_vertex: Vec<f64>,
    /// Diagnostic: average pairwise angle (radians) between incident
    /// up-norms, same conventions as `per_vertex`.
    pub per_vertex_angle: Vec<f64>,
    /// Total regularization value, the sum of `per_vertex`.
    pub total: f64,
}

fn pair_count(m: usize) -> f64 {
    (m * (m - 1) / 2) as f64
}

/// Regularization value for the given parameters.
///
/// Vertices with a single incident simplex have no up-norm pair and
/// contribute zero.
pub fn regularization_value(
    points: &PointSet,
    tri: &Triangulation,
    psi: &[f64],
) -> Result<CurvatureReport> {
    let geos = interpolation::compute_geometry(points, tri, psi)?;
    Ok(value_from_geometry(points, tri, &geos))
}

pub(crate) fn value_from_geometry(
    points: &PointSet,
    tri: &Triangulation,
    geos: &[SimplexGeometry],
) -> CurvatureReport {
    let n = points.len();
    let mut per_vertex = vec![0.0; n];
    let mut per_vertex_angle = vec![0.0; n];
    for v in 0..n {
        let incident = tri.incident(v);
        let m = incident.len();
        if m < 2 {
            continue;
        }
        let mut cos_sum = 0.0;
        let mut angle_sum = 0.0;
        for (a, &sk) in incident.iter().enumerate() {
            for &sj in incident.iter().skip(a + 1) {
                let c = math::dot(&geos[sk].up_norm, &geos[sj].up_norm);
                cos_sum += c;
                angle_sum += math::acos(c.clamp(-1.0, 1.0));
            }
        }
        per_vertex[v] = 1.0 - cos_sum / pair_count(m);
        per_vertex_angle[v] = angle_sum / pair_count(m);
    }
    let total = per_vertex.iter().sum();
    CurvatureReport { per_vertex, per_vertex_angle, total }
}

/// Analytic gradient of the regularization value with respect to each
/// parameter, via the chain rule through the up-norm map.
pub fn regularization_gradient(
    points: &PointSet,
    tri: &Triangulation,
    psi: &[f64],
) -> Result<Vec<f64>> {
    let geos = interpolation::compute_geometry(points, tri, psi)?;
    Ok(gradient_from_geometry(points, tri, &geos))
}

pub(crate) fn gradient_from_geometry(
    points: &PointSet,
    tri: &Triangulation,
    geos: &[SimplexGeometry],
) -> Vec<f64> {
    let n = points.len();
    let p = points.dim();
    // A(v) = sum of incident up-norms, the workhorse of both value and
    // gradient: sum over pairs of <n_k, n_j> = (||A||^2 - m) / 2
    let mut up_sum = vec![0.0; n * (p + 1)];
    for v in 0..n {
        for &s in tri.incident(v) {
            for c in 0..=p {
                up_sum[v * (p + 1) + c] += geos[s].up_norm[c];
            }
        }
    }

    let mut grad = vec![0.0; n];
    let mut dn = vec![0.0; p + 1];
    for (sid, s) in tri.simplices().iter().enumerate() {
        let geo = &geos[sid];
        let u_len = math::sqrt(1.0 + math::dot(&geo.gradient, &geo.gradient));
        for slot in 0..=p {
            let m_id = s.vertex_ids()[slot];
            // dG/dpsi_m: column of the edge inverse, or minus its row sums
            // for the anchor vertex
            let mut dgrad = vec![0.0; p];
            if slot == 0 {
                for row in 0..p {
                    dgrad[row] =
                        -(0..p).map(|c| geo.edge_inverse[row * p + c]).sum::<f64>();
                }
            } else {
                for row in 0..p {
                    dgrad[row] = geo.edge_inverse[row * p + (slot - 1)];
                }
            }
            // dn/dpsi_m = (I - n n^T) (-dG, 0) / ||(-G, 1)||
            let mut w = vec![0.0; p + 1];
            for c in 0..p {
                w[c] = -dgrad[c];
            }
            let proj = math::dot(&geo.up_norm, &w);
            for c in 0..=p {
                dn[c] = (w[c] - geo.up_norm[c] * proj) / u_len;
            }
            // each vertex of this simplex owns a curvature term touched by
            // psi_m through this simplex's up-norm
            for &center in s.vertex_ids() {
                let m_inc = tri.incident(center).len();
                if m_inc < 2 {
                    continue;
                }
                let base = center * (p + 1);
                let mut inner = 0.0;
                for c in 0..=p {
                    inner += dn[c] * (up_sum[base + c] - geo.up_norm[c]);
                }
                grad[m_id] -= inner / pair_count(m_inc);
            }
        }
    }
    grad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::build_delaunay;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn central_difference(
        points: &PointSet,
        tri: &Triangulation,
        psi: &[f64],
        h: f64,
    ) -> Vec<f64> {
        let mut out = vec![0.0; psi.len()];
        let mut work = psi.to_vec();
        for i in 0..psi.len() {
            work[i] = psi[i] + h;
            let up = regularization_value(points, tri, &work).unwrap().total;
            work[i] = psi[i] - h;
            let down = regularization_value(points, tri, &work).unwrap().total;
            work[i] = psi[i];
            out[i] = (up - down) / (2.0 * h);
        }
        out
    }

    #[test]
    fn hand_computed_1d_example() {
        // points {0, 1, 2} with psi = (0, 1, 0): the interior vertex sees
        // up-norms (-1, 1)/sqrt(2) and (1, 1)/sqrt(2) with inner product
        // zero, so its term is 1; the endpoints contribute nothing
        let pts = PointSet::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let tri = build_delaunay(&pts).unwrap();
        let report = regularization_value(&pts, &tri, &[0.0, 1.0, 0.0]).unwrap();
        assert!((report.total - 1.0).abs() < 1e-10);
        assert!((report.per_vertex[1] - 1.0).abs() < 1e-10);
        assert_eq!(report.per_vertex[0], 0.0);
        assert_eq!(report.per_vertex[2], 0.0);
        // the diagnostic angle at the interior vertex is a right angle
        assert!((report.per_vertex_angle[1] - core::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn affine_parameters_have_zero_curvature() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rows: Vec<Vec<f64>> =
            (0..40).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let pts = PointSet::from_rows(&rows).unwrap();
        let tri = build_delaunay(&pts).unwrap();
        let psi: Vec<f64> = pts.iter().map(|x| 0.5 + 1.5 * x[0] - 2.0 * x[1]).collect();
        let report = regularization_value(&pts, &tri, &psi).unwrap();
        assert!(report.total.abs() < 1e-10, "R = {}", report.total);
        let grad = regularization_gradient(&pts, &tri, &psi).unwrap();
        let norm = math::norm(&grad);
        assert!(norm < 1e-8, "gradient norm {norm}");
    }

    #[test]
    fn scaling_psi_increases_curvature_toward_bound() {
        let pts = PointSet::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let tri = build_delaunay(&pts).unwrap();
        let base = [0.0, 1.0, 0.0];
        let mut last = 0.0;
        for t in [1.0, 10.0, 100.0] {
            let psi: Vec<f64> = base.iter().map(|&x| t * x).collect();
            let report = regularization_value(&pts, &tri, &psi).unwrap();
            assert!(report.total > last);
            assert!(report.per_vertex.iter().all(|&k| (0.0..=2.0).contains(&k)));
            last = report.total;
        }
        assert!(last < 2.0);
    }

    #[test]
    fn term_bounds_and_nonnegativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let rows: Vec<Vec<f64>> =
            (0..30).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let pts = PointSet::from_rows(&rows).unwrap();
        let tri = build_delaunay(&pts).unwrap();
        let psi: Vec<f64> = (0..30).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
        let report = regularization_value(&pts, &tri, &psi).unwrap();
        assert!(report.total >= 0.0);
        assert!(report.per_vertex.iter().all(|&k| (0.0..=2.0).contains(&k)));
    }

    #[test]
    fn translation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let rows: Vec<Vec<f64>> =
            (0..25).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let pts = PointSet::from_rows(&rows).unwrap();
        let tri = build_delaunay(&pts).unwrap();
        let psi: Vec<f64> = (0..25).map(|_| rng.gen::<f64>()).collect();
        let shifted: Vec<f64> = psi.iter().map(|x| x + 17.25).collect();
        let a = regularization_value(&pts, &tri, &psi).unwrap().total;
        let b = regularization_value(&pts, &tri, &shifted).unwrap().total;
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn rotation_invariance() {
        // rotating the feature space leaves all up-norm inner products
        // unchanged; the triangulation rotates along
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let rows: Vec<Vec<f64>> =
            (0..25).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let pts = PointSet::from_rows(&rows).unwrap();
        let (s, c) = (0.6_f64, 0.8_f64); // a 3-4-5 rotation
        let rotated: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| vec![c * r[0] - s * r[1], s * r[0] + c * r[1]])
            .collect();
        let rpts = PointSet::from_rows(&rotated).unwrap();
        let tri = build_delaunay(&pts).unwrap();
        let rtri = build_delaunay(&rpts).unwrap();
        let psi: Vec<f64> = (0..25).map(|_| rng.gen::<f64>()).collect();
        let a = regularization_value(&pts, &tri, &psi).unwrap().total;
        let b = regularization_value(&rpts, &rtri, &psi).unwrap().total;
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn gradient_sign_at_interior_vertex() {
        let pts = PointSet::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let tri = build_delaunay(&pts).unwrap();
        let psi = [0.0, 1.0, 0.0];
        let grad = regularization_gradient(&pts, &tri, &psi).unwrap();
        let fd = central_difference(&pts, &tri, &psi, 1e-6);
        assert_eq!(grad[1].signum(), fd[1].signum());
        assert!(grad[1] > 0.0); // raising the bump increases curvature
    }

    #[test]
    fn gradient_matches_finite_differences_2d() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..20 {
            let n = 12 + (rng.gen::<u32>() % 10) as usize;
            let rows: Vec<Vec<f64>> =
                (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
            let pts = PointSet::from_rows(&rows).unwrap();
            let tri = build_delaunay(&pts).unwrap();
            let psi: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            let grad = regularization_gradient(&pts, &tri, &psi).unwrap();
            let fd = central_difference(&pts, &tri, &psi, 1e-6);
            let scale = fd.iter().fold(0.0_f64, |a, &b| a.max(b.abs())).max(1e-8);
            for (g, f) in grad.iter().zip(&fd) {
                assert!((g - f).abs() / scale < 1e-5, "analytic {g} vs fd {f}");
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences_1d() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..10 {
            let n = 8;
            let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen::<f64>() * 3.0]).collect();
            let pts = match PointSet::from_rows(&rows) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let Ok(tri) = build_delaunay(&pts) else { continue };
            let psi: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let grad = regularization_gradient(&pts, &tri, &psi).unwrap();
            let fd = central_difference(&pts, &tri, &psi, 1e-6);
            let scale = fd.iter().fold(0.0_f64, |a, &b| a.max(b.abs())).max(1e-8);
            for (g, f) in grad.iter().zip(&fd) {
                assert!((g - f).abs() / scale < 1e-5);
            }
        }
    }
}
