//! Robust geometric primitives: orientation, in-circumsphere and
//! barycentric solves.
//!
//! Predicates evaluate in floating point first, guarded by a forward error
//! bound on the cofactor expansion. Whenever the bound cannot certify the
//! sign, evaluation escalates to exact dyadic arithmetic, so reported signs
//! are always the signs of the exact real determinants.

pub(crate) mod exact;

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg;

/// Exact sign of a geometric determinant.
///
/// `Zero` is returned only when the arbitrary-precision evaluation is
/// exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    #[inline]
    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }

    #[inline]
    fn combine(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

/// Filter constant: `64 * n * eps * permanent` dominates the rounding error
/// of an `n x n` cofactor expansion over entries that are themselves
/// first-order rounded (coordinate differences, squared distances).
fn filter_bound(n: usize, permanent: f64) -> f64 {
    64.0 * n as f64 * f64::EPSILON * permanent
}

fn check_simplex(simplex: &[&[f64]], expected_len: usize) -> Result<usize> {
    let Some(first) = simplex.first() else {
        return Err(Error::InvalidInput("empty vertex list".to_string()));
    };
    let dim = first.len();
    if dim == 0 {
        return Err(Error::InvalidInput("zero-dimensional points".to_string()));
    }
    if simplex.len() != expected_len {
        return Err(Error::InvalidInput("wrong number of simplex vertices".to_string()));
    }
    for v in simplex {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("coordinates must be finite".to_string()));
        }
    }
    Ok(dim)
}

/// Orientation of `p+1` points in `R^p`: the sign of the determinant of the
/// edge matrix anchored at vertex 0. `Zero` iff the points are affinely
/// dependent, decided exactly.
pub fn orient(simplex: &[&[f64]]) -> Result<Sign> {
    let dim = check_simplex(simplex, simplex.len())?;
    if simplex.len() != dim + 1 {
        return Err(Error::InvalidInput(
            "orientation needs exactly p+1 points of dimension p".to_string(),
        ));
    }
    Ok(orient_unchecked(simplex))
}

pub(crate) fn orient_unchecked(simplex: &[&[f64]]) -> Sign {
    let p = simplex.len() - 1;
    let mut m = Vec::with_capacity(p * p);
    for row in 1..=p {
        for col in 0..p {
            m.push(simplex[row][col] - simplex[0][col]);
        }
    }
    let (det, perm) = linalg::det_with_permanent(&m, p);
    let bound = filter_bound(p, perm);
    if det > bound {
        return Sign::Positive;
    }
    if det < -bound {
        return Sign::Negative;
    }
    // uncertified: evaluate exactly
    let mut md = Vec::with_capacity(p * p);
    for row in 1..=p {
        md.extend(exact::diff_row(simplex[row], simplex[0]));
    }
    exact::det_sign(&md, p)
}

/// Builds the lifted in-sphere matrix rows `(v_i - q, ||v_i - q||^2)` in
/// floating point, with its permanent bound.
fn insphere_matrix(simplex: &[&[f64]], query: &[f64]) -> (Vec<f64>, usize) {
    let p = simplex.len() - 1;
    let n = p + 1;
    let mut m = Vec::with_capacity(n * n);
    for v in simplex {
        let mut sq = 0.0;
        for col in 0..p {
            let d = v[col] - query[col];
            m.push(d);
            sq += d * d;
        }
        m.push(sq);
    }
    (m, n)
}

fn insphere_matrix_exact(simplex: &[&[f64]], query: &[f64]) -> Vec<exact::Dyadic> {
    let p = simplex.len() - 1;
    let mut m = Vec::with_capacity((p + 1) * (p + 1));
    for v in simplex {
        m.extend(exact::diff_row(v, query));
        m.push(exact::dist_sq(v, query));
    }
    m
}

/// Sign of the raw lifted determinant, `Zero` on exact ties.
fn insphere_raw(simplex: &[&[f64]], query: &[f64]) -> Sign {
    let (m, n) = insphere_matrix(simplex, query);
    let (det, perm) = linalg::det_with_permanent(&m, n);
    let bound = filter_bound(n, perm);
    if det > bound {
        return Sign::Positive;
    }
    if det < -bound {
        return Sign::Negative;
    }
    exact::det_sign(&insphere_matrix_exact(simplex, query), n)
}

/// Parity linking the raw lifted determinant to sphere membership: for a
/// positively oriented simplex the query is strictly inside iff the raw
/// sign equals `(-1)^p`.
fn parity(p: usize) -> Sign {
    if p % 2 == 0 {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

/// In-circumsphere test against a positively oriented simplex.
///
/// `Positive` iff `query` lies strictly inside the circumsphere, `Zero` iff
/// it lies exactly on it. A negatively oriented simplex flips the answer
/// consistently; an affinely degenerate one is rejected.
pub fn in_circumsphere(simplex: &[&[f64]], query: &[f64]) -> Result<Sign> {
    let dim = check_simplex(simplex, simplex.len())?;
    if simplex.len() != dim + 1 {
        return Err(Error::InvalidInput(
            "in-circumsphere needs exactly p+1 simplex vertices".to_string(),
        ));
    }
    if query.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: query.len() });
    }
    let orientation = orient_unchecked(simplex);
    if orientation.is_zero() {
        return Err(Error::DegenerateSimplex);
    }
    let raw = insphere_raw(simplex, query);
    Ok(raw.combine(parity(dim)).combine(orientation))
}

/// In-circumsphere with symbolic perturbation of the lifted heights, used
/// by the triangulation builder. Never returns `Zero`.
///
/// `simplex_ids` and `query_id` are the global vertex indices driving the
/// perturbation order; `orientation` is the precomputed exact orientation
/// of `simplex`.
pub(crate) fn in_circumsphere_perturbed(
    simplex: &[&[f64]],
    simplex_ids: &[usize],
    query: &[f64],
    query_id: usize,
    orientation: Sign,
) -> Sign {
    debug_assert!(!orientation.is_zero());
    let p = simplex.len() - 1;
    let raw = insphere_raw(simplex, query);
    let raw = if raw.is_zero() {
        let m = insphere_matrix_exact(simplex, query);
        let rows: Vec<(usize, usize)> =
            simplex_ids.iter().copied().enumerate().collect();
        exact::perturbed_det_sign(&m, p + 1, &rows, query_id)
    } else {
        raw
    };
    raw.combine(parity(p)).combine(orientation)
}

/// Decides whether a query lying exactly in the hyperplane of a facet falls
/// strictly inside the facet's circumsphere within that hyperplane, with
/// the same symbolic perturbation. Requires `p >= 2` and a query known to
/// be coplanar with the facet (exact orientation zero).
pub(crate) fn facet_sphere_contains(
    facet: &[&[f64]],
    facet_ids: &[usize],
    query: &[f64],
    query_id: usize,
) -> bool {
    let p = facet[0].len();
    debug_assert_eq!(facet.len(), p);
    debug_assert!(p >= 2);
    // normal of the facet hyperplane from exact edge cofactors
    let mut edges = Vec::with_capacity((p - 1) * p);
    for row in 1..p {
        edges.extend(exact::diff_row(facet[row], facet[0]));
    }
    let normal = exact::cross_product(&edges, p);
    // rows (v_i - q, ||v_i - q||^2), then (normal, 0)
    let n = p + 1;
    let mut m = Vec::with_capacity(n * n);
    for v in facet {
        m.extend(exact::diff_row(v, query));
        m.push(exact::dist_sq(v, query));
    }
    for entry in &normal {
        m.push(exact::int_to_dyadic(entry));
    }
    m.push(exact::Dyadic::zero());
    let rows: Vec<(usize, usize)> = facet_ids.iter().copied().enumerate().collect();
    let sign = exact::perturbed_det_sign(&m, n, &rows, query_id);
    // strictly inside iff the determinant sign equals (-1)^p
    sign == parity(p)
}

/// Exact affine rank of a point tuple (one more than the dimension of the
/// affine subspace they span).
pub(crate) fn affine_rank(points: &[&[f64]]) -> usize {
    if points.is_empty() {
        return 0;
    }
    let p = points[0].len();
    let rows = points.len() - 1;
    if rows == 0 {
        return 1;
    }
    let mut m = Vec::with_capacity(rows * p);
    for row in 1..points.len() {
        m.extend(exact::diff_row(points[row], points[0]));
    }
    exact::rank(&m, rows, p) + 1
}

/// Barycentric coordinates of `query` with respect to a non-degenerate
/// simplex: `p+1` coefficients summing to one that reproduce the query,
/// negative outside the simplex.
pub fn solve_barycentric(simplex: &[&[f64]], query: &[f64]) -> Result<Vec<f64>> {
    let dim = check_simplex(simplex, simplex.len())?;
    if simplex.len() != dim + 1 {
        return Err(Error::InvalidInput(
            "barycentric solve needs exactly p+1 simplex vertices".to_string(),
        ));
    }
    if query.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: query.len() });
    }
    if orient_unchecked(simplex).is_zero() {
        return Err(Error::DegenerateSimplex);
    }
    solve_barycentric_unchecked(simplex, query)
}

pub(crate) fn solve_barycentric_unchecked(
    simplex: &[&[f64]],
    query: &[f64],
) -> Result<Vec<f64>> {
    let p = simplex[0].len();
    // edge matrix columns are v_j - v_0; solve for the trailing p weights
    let mut a = Vec::with_capacity(p * p);
    for row in 0..p {
        for col in 0..p {
            a.push(simplex[col + 1][row] - simplex[0][row]);
        }
    }
    let mut b: Vec<f64> = (0..p).map(|row| query[row] - simplex[0][row]).collect();
    let tail = linalg::lu_solve(&mut a, &mut b, p).ok_or(Error::DegenerateSimplex)?;
    let mut coeffs = Vec::with_capacity(p + 1);
    coeffs.push(1.0 - tail.iter().sum::<f64>());
    coeffs.extend(tail);
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn refs<'a>(pts: &'a [Vec<f64>]) -> Vec<&'a [f64]> {
        pts.iter().map(|p| p.as_slice()).collect()
    }

    #[test]
    fn orient_unit_right_triangle() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(orient(&refs(&pts)).unwrap(), Sign::Positive);
    }

    #[test]
    fn orient_collinear_points() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]];
        assert_eq!(orient(&refs(&pts)).unwrap(), Sign::Zero);
    }

    #[test]
    fn orient_swap_flips_sign() {
        let pts = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(orient(&refs(&pts)).unwrap(), Sign::Negative);
    }

    #[test]
    fn orient_1d_and_3d() {
        let pts = vec![vec![0.0], vec![1.0]];
        assert_eq!(orient(&refs(&pts)).unwrap(), Sign::Positive);
        let pts = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        assert_eq!(orient(&refs(&pts)).unwrap(), Sign::Positive);
    }

    #[test]
    fn insphere_interior_point() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let s = in_circumsphere(&refs(&pts), &[0.25, 0.25]).unwrap();
        assert_eq!(s, Sign::Positive);
    }

    #[test]
    fn insphere_cocircular_point_is_zero() {
        // (1,1) lies exactly on the circle centered (0.5,0.5), radius sqrt(0.5)
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let s = in_circumsphere(&refs(&pts), &[1.0, 1.0]).unwrap();
        assert_eq!(s, Sign::Zero);
    }

    #[test]
    fn insphere_far_point() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let s = in_circumsphere(&refs(&pts), &[5.0, 5.0]).unwrap();
        assert_eq!(s, Sign::Negative);
    }

    #[test]
    fn insphere_own_vertices_are_on_sphere() {
        let pts = vec![vec![0.2, 0.7], vec![1.5, -0.25], vec![-0.5, 1.125]];
        let r = refs(&pts);
        for v in &pts {
            assert_eq!(in_circumsphere(&r, v).unwrap(), Sign::Zero);
        }
    }

    #[test]
    fn insphere_orientation_consistency() {
        // swapping two vertices must not change sphere membership
        let pos = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let neg = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]];
        for q in [[0.25, 0.25], [5.0, 5.0]] {
            assert_eq!(
                in_circumsphere(&refs(&pos), &q).unwrap(),
                in_circumsphere(&refs(&neg), &q).unwrap()
            );
        }
    }

    #[test]
    fn insphere_rejects_degenerate_simplex() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]];
        assert_eq!(
            in_circumsphere(&refs(&pts), &[0.5, 0.5]).unwrap_err(),
            Error::DegenerateSimplex
        );
    }

    #[test]
    fn insphere_1d_and_3d_interior() {
        let seg = vec![vec![0.0], vec![1.0]];
        assert_eq!(in_circumsphere(&refs(&seg), &[0.5]).unwrap(), Sign::Positive);
        assert_eq!(in_circumsphere(&refs(&seg), &[2.0]).unwrap(), Sign::Negative);
        let tet = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        assert_eq!(
            in_circumsphere(&refs(&tet), &[0.25, 0.25, 0.25]).unwrap(),
            Sign::Positive
        );
        assert_eq!(
            in_circumsphere(&refs(&tet), &[9.0, 9.0, 9.0]).unwrap(),
            Sign::Negative
        );
    }

    #[test]
    fn barycentric_identity_and_centroid() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let r = refs(&pts);
        for (k, v) in pts.iter().enumerate() {
            let c = solve_barycentric(&r, v).unwrap();
            for (i, &ci) in c.iter().enumerate() {
                let expect = if i == k { 1.0 } else { 0.0 };
                assert!((ci - expect).abs() < 1e-12);
            }
        }
        let c = solve_barycentric(&r, &[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        for ci in c {
            assert!((ci - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn barycentric_outside_point() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let c = solve_barycentric(&refs(&pts), &[1.0, 1.0]).unwrap();
        assert!((c[0] - -1.0).abs() < 1e-12);
        assert!((c[1] - 1.0).abs() < 1e-12);
        assert!((c[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn barycentric_rejects_degenerate() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]];
        assert_eq!(
            solve_barycentric(&refs(&pts), &[0.5, 0.5]).unwrap_err(),
            Error::DegenerateSimplex
        );
    }

    #[test]
    fn facet_sphere_on_line() {
        let facet = vec![vec![0.0, 0.0], vec![2.0, 0.0]];
        let r = refs(&facet);
        // strictly between the endpoints: inside the diametral circle
        assert!(facet_sphere_contains(&r, &[0, 1], &[1.0, 0.0], 2));
        // beyond an endpoint: outside
        assert!(!facet_sphere_contains(&r, &[0, 1], &[3.0, 0.0], 2));
        assert!(!facet_sphere_contains(&r, &[0, 1], &[-1.0, 0.0], 2));
    }

    #[test]
    fn affine_rank_detects_degeneracy() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]];
        assert_eq!(affine_rank(&refs(&pts)), 2);
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(affine_rank(&refs(&pts)), 3);
    }
}
