//! Evaluation of the piecewise-linear interpolant and its per-simplex
//! gradient, the two quantities every downstream module consumes.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg;
use crate::math;
use crate::model::DtlModel;
use crate::point::PointSet;
use crate::predicates;
use crate::triangulation::{LocateResult, Triangulation};

/// Per-simplex affine data for a fixed parameter vector: the gradient `G`
/// of the affine piece and the unit up-norm `(-G, 1) / ||(-G, 1)||` of its
/// lifted image. Invalidated whenever the parameters change.
#[derive(Debug, Clone)]
pub struct SimplexGeometry {
    pub simplex_id: usize,
    pub gradient: Vec<f64>,
    pub up_norm: Vec<f64>,
    /// Inverse of the edge matrix rows `(v_j - v_0)`, kept for the
    /// regularizer's chain rule.
    pub(crate) edge_inverse: Vec<f64>,
}

/// Gradient of the affine function interpolating `(vertex_j, psi_j)` over
/// one simplex: the unique `G` with `(v_j - v_0) . G = psi_j - psi_0`.
pub fn simplex_gradient(points: &PointSet, vertex_ids: &[usize], psi: &[f64]) -> Result<Vec<f64>> {
    let p = points.dim();
    if vertex_ids.len() != p + 1 {
        return Err(Error::InvalidInput("simplex needs exactly p+1 vertices".to_string()));
    }
    let mut a = edge_matrix(points, vertex_ids);
    let mut b: Vec<f64> = (1..=p)
        .map(|j| psi[vertex_ids[j]] - psi[vertex_ids[0]])
        .collect();
    linalg::lu_solve(&mut a, &mut b, p).ok_or(Error::DegenerateSimplex)
}

fn edge_matrix(points: &PointSet, vertex_ids: &[usize]) -> Vec<f64> {
    let p = points.dim();
    let v0 = points.point(vertex_ids[0]);
    let mut a = Vec::with_capacity(p * p);
    for &v in &vertex_ids[1..] {
        let pt = points.point(v);
        for col in 0..p {
            a.push(pt[col] - v0[col]);
        }
    }
    a
}

/// Unit up-norm vector of a lifted simplex with gradient `G`: the normal
/// of the simplex image with positive last coordinate.
pub fn up_norm(gradient: &[f64]) -> Vec<f64> {
    let mut u: Vec<f64> = gradient.iter().map(|g| -g).collect();
    u.push(1.0);
    let norm = math::norm(&u);
    for x in &mut u {
        *x /= norm;
    }
    u
}

/// Computes the geometry of every simplex for the given parameters, in
/// simplex-id order.
pub fn compute_geometry(
    points: &PointSet,
    tri: &Triangulation,
    psi: &[f64],
) -> Result<Vec<SimplexGeometry>> {
    if psi.len() != points.len() {
        return Err(Error::InvalidInput(
            "parameter vector length must match the point count".to_string(),
        ));
    }
    let p = points.dim();
    let mut out = Vec::with_capacity(tri.num_simplices());
    for (id, s) in tri.simplices().iter().enumerate() {
        let a = edge_matrix(points, s.vertex_ids());
        let edge_inverse = linalg::invert(&a, p).ok_or(Error::DegenerateSimplex)?;
        let mut b: Vec<f64> = (1..=p)
            .map(|j| psi[s.vertex_ids()[j]] - psi[s.vertex_ids()[0]])
            .collect();
        // gradient = edge_inverse * b
        let mut gradient = Vec::with_capacity(p);
        for row in 0..p {
            gradient.push(math::dot(&edge_inverse[row * p..(row + 1) * p], &b));
        }
        b.clear();
        out.push(SimplexGeometry {
            simplex_id: id,
            up_norm: up_norm(&gradient),
            gradient,
            edge_inverse,
        });
    }
    Ok(out)
}

/// Value of the interpolant at `query`: the barycentric combination of the
/// covering simplex's parameters inside the hull, the nearest vertex's
/// parameter outside.
///
/// The fallback makes the surface discontinuous across the hull boundary;
/// inside the hull the interpolant is continuous piecewise-linear.
pub fn evaluate(model: &DtlModel, query: &[f64]) -> Result<f64> {
    match model.tri().locate(model.points(), query)? {
        LocateResult::InsideSimplex { simplex, barycentric } => {
            let verts = model.tri().simplex(simplex).vertex_ids();
            Ok(barycentric
                .iter()
                .zip(verts)
                .map(|(&l, &v)| l * model.psi()[v])
                .sum())
        }
        LocateResult::OutsideHull { nearest_vertex } => Ok(model.psi()[nearest_vertex]),
    }
}

/// Gradient of the interpolant at a query strictly inside one simplex.
///
/// Errors with [`Error::OutsideHull`] under the constant fallback and with
/// [`Error::OnFacet`] when the query lies exactly on a facet, where the
/// gradient is ambiguous.
pub fn evaluate_gradient(model: &DtlModel, query: &[f64]) -> Result<Vec<f64>> {
    match model.tri().locate(model.points(), query)? {
        LocateResult::InsideSimplex { simplex, .. } => {
            let s = model.tri().simplex(simplex);
            for k in 0..s.vertex_ids().len() {
                let facet: Vec<&[f64]> = s
                    .vertex_ids()
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, &v)| model.points().point(v))
                    .collect();
                let mut with_q = facet.clone();
                with_q.push(query);
                if predicates::orient_unchecked(&with_q).is_zero() {
                    return Err(Error::OnFacet);
                }
            }
            simplex_gradient(model.points(), s.vertex_ids(), model.psi())
        }
        LocateResult::OutsideHull { .. } => Err(Error::OutsideHull),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::model_from;
    use crate::triangulation::build_delaunay;
    use alloc::vec;

    fn triangle() -> (PointSet, Triangulation) {
        let pts = PointSet::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ])
        .unwrap();
        let tri = build_delaunay(&pts).unwrap();
        (pts, tri)
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let (pts, tri) = triangle();
        let psi = vec![2.5; 4];
        for s in tri.simplices() {
            let g = simplex_gradient(&pts, s.vertex_ids(), &psi).unwrap();
            assert!(g.iter().all(|&x| x.abs() < 1e-14));
        }
    }

    #[test]
    fn gradient_reproduces_affine() {
        // psi = x1 + 2 x2 on the unit right triangle
        let pts =
            PointSet::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let psi = vec![0.0, 1.0, 2.0];
        let g = simplex_gradient(&pts, &[0, 1, 2], &psi).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-12);
        assert!((g[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_is_anchor_independent() {
        let pts =
            PointSet::from_rows(&[vec![0.2, 0.3], vec![1.1, 0.4], vec![0.5, 1.7]]).unwrap();
        let psi = vec![0.7, -1.2, 2.9];
        let g1 = simplex_gradient(&pts, &[0, 1, 2], &psi).unwrap();
        let g2 = simplex_gradient(&pts, &[2, 0, 1], &psi).unwrap();
        let g3 = simplex_gradient(&pts, &[1, 2, 0], &psi).unwrap();
        for k in 0..2 {
            assert!((g1[k] - g2[k]).abs() < 1e-12);
            assert!((g1[k] - g3[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn up_norm_flat_and_1d() {
        let u = up_norm(&[0.0, 0.0]);
        assert_eq!(u, vec![0.0, 0.0, 1.0]);
        let u = up_norm(&[1.0]);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        assert!((u[0] + s).abs() < 1e-15);
        assert!((u[1] - s).abs() < 1e-15);
    }

    #[test]
    fn up_norm_orthogonal_to_lifted_edges() {
        // orthogonality to every lifted edge vector (e, <G, e>)
        let pts =
            PointSet::from_rows(&[vec![0.2, 0.3], vec![1.1, 0.4], vec![0.5, 1.7]]).unwrap();
        let psi = vec![0.7, -1.2, 2.9];
        let g = simplex_gradient(&pts, &[0, 1, 2], &psi).unwrap();
        let u = up_norm(&g);
        assert!((math::norm(&u) - 1.0).abs() < 1e-12);
        assert!(u[2] > 0.0);
        for j in 1..3 {
            let e: Vec<f64> = (0..2).map(|c| pts.point(j)[c] - pts.point(0)[c]).collect();
            let lifted = [e[0], e[1], math::dot(&g, &e)];
            assert!(math::dot(&u, &lifted).abs() < 1e-10);
        }
    }

    #[test]
    fn evaluate_interpolates_and_reproduces_affine() {
        let (pts, tri) = triangle();
        // psi from the affine function 1 + 2 x1 - x2
        let psi: Vec<f64> = pts.iter().map(|x| 1.0 + 2.0 * x[0] - x[1]).collect();
        let model = model_from(pts.clone(), tri, psi.clone());
        for (i, x) in pts.iter().enumerate() {
            assert!((evaluate(&model, x).unwrap() - psi[i]).abs() < 1e-12);
        }
        for q in [[0.3, 0.4], [0.9, 0.05], [0.5, 0.5]] {
            let expect = 1.0 + 2.0 * q[0] - q[1];
            assert!((evaluate(&model, &q).unwrap() - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn evaluate_square_example() {
        let (pts, tri) = triangle();
        let model = model_from(pts, tri, vec![0.0, 1.0, 1.0, 2.0]);
        let v = evaluate(&model, &[0.5, 0.5]).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evaluate_outside_hull_uses_nearest_parameter() {
        let (pts, tri) = triangle();
        let model = model_from(pts, tri, vec![0.0, 1.0, 1.0, 2.0]);
        let v = evaluate(&model, &[3.0, 3.2]).unwrap();
        assert_eq!(v, 2.0);
    }

    #[test]
    fn gradient_errors() {
        let (pts, tri) = triangle();
        let model = model_from(pts, tri, vec![0.0, 1.0, 1.0, 2.0]);
        assert_eq!(evaluate_gradient(&model, &[3.0, 3.0]).unwrap_err(), Error::OutsideHull);
        assert_eq!(evaluate_gradient(&model, &[0.5, 0.5]).unwrap_err(), Error::OnFacet);
        let g = evaluate_gradient(&model, &[0.25, 0.25]).unwrap();
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<Vec<f64>> =
            (0..30).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let pts = PointSet::from_rows(&rows).unwrap();
        let tri = build_delaunay(&pts).unwrap();
        let psi: Vec<f64> = (0..30).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let model = model_from(pts, tri, psi);
        let h = 1e-6;
        let mut checked = 0;
        while checked < 20 {
            let q = [0.1 + 0.8 * rng.gen::<f64>(), 0.1 + 0.8 * rng.gen::<f64>()];
            let Ok(g) = evaluate_gradient(&model, &q) else { continue };
            let mut ok = true;
            for k in 0..2 {
                let mut qp = q;
                let mut qm = q;
                qp[k] += h;
                qm[k] -= h;
                let fd = (evaluate(&model, &qp).unwrap() - evaluate(&model, &qm).unwrap())
                    / (2.0 * h);
                // skip samples whose stencil straddles a facet
                if (fd - g[k]).abs() > 1e-5 * fd.abs().max(1.0) {
                    ok = false;
                }
            }
            if ok {
                checked += 1;
            }
        }
    }

    #[test]
    fn continuity_across_facets() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let rows: Vec<Vec<f64>> =
            (0..40).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let pts = PointSet::from_rows(&rows).unwrap();
        let tri = build_delaunay(&pts).unwrap();
        let psi: Vec<f64> = (0..40).map(|_| rng.gen::<f64>()).collect();
        let geos = compute_geometry(&pts, &tri, &psi).unwrap();
        let affine_at = |cell: usize, q: &[f64]| -> f64 {
            let verts = tri.simplex(cell).vertex_ids();
            let v0 = pts.point(verts[0]);
            psi[verts[0]]
                + (0..2).map(|c| geos[cell].gradient[c] * (q[c] - v0[c])).sum::<f64>()
        };
        let mut tested = 0;
        for (idx, s) in tri.simplices().iter().enumerate() {
            for (k, nb) in s.neighbor_ids().iter().enumerate() {
                let Some(nb) = *nb else { continue };
                if nb < idx {
                    continue;
                }
                // random point on the shared facet
                let fverts: Vec<usize> = s
                    .vertex_ids()
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, &v)| v)
                    .collect();
                let t: f64 = rng.gen();
                let q: Vec<f64> = (0..2)
                    .map(|c| {
                        t * pts.point(fverts[0])[c] + (1.0 - t) * pts.point(fverts[1])[c]
                    })
                    .collect();
                let a = affine_at(idx, &q);
                let b = affine_at(nb, &q);
                assert!((a - b).abs() < 1e-10, "facet jump {}", (a - b).abs());
                tested += 1;
            }
        }
        assert!(tested > 30);
    }
}
