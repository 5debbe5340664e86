//! The Delaunay triangulation of the training points: construction,
//! point location and hull queries.

mod build;
mod random;

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::point::PointSet;
use crate::predicates::{self, Sign};

pub use random::random_triangulation;

/// One `p`-simplex of a triangulation.
///
/// Vertex ids are distinct, positively oriented and stored sorted except
/// for a possible swap of the last two entries that fixes the orientation.
/// `neighbor_ids[k]` is the simplex sharing the facet opposite
/// `vertex_ids[k]`; `None` marks a convex-hull facet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simplex {
    vertex_ids: Vec<usize>,
    neighbor_ids: Vec<Option<usize>>,
}

impl Simplex {
    pub fn vertex_ids(&self) -> &[usize] {
        &self.vertex_ids
    }

    pub fn neighbor_ids(&self) -> &[Option<usize>] {
        &self.neighbor_ids
    }
}

/// Result of point location.
#[derive(Debug, Clone, PartialEq)]
pub enum LocateResult {
    /// The query lies in the closure of this simplex; barycentric entries
    /// are nonnegative (boundary entries clamped to zero) and sum to one.
    InsideSimplex { simplex: usize, barycentric: Vec<f64> },
    /// The query lies strictly outside the hull; carries the nearest
    /// training point, ties broken by lowest index.
    OutsideHull { nearest_vertex: usize },
}

/// A simplicial complex over a point set: the Delaunay mesh from
/// [`build_delaunay`], or a deliberately non-Delaunay one from
/// [`random_triangulation`].
#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    dim: usize,
    n_points: usize,
    simplices: Vec<Simplex>,
    hull_facets: Vec<(usize, usize)>,
    vertex_to_incident: Vec<Vec<usize>>,
}

/// Builds the Delaunay triangulation by incremental insertion.
///
/// Deterministic for a fixed input ordering; cospherical ties are broken by
/// symbolic perturbation ordered by vertex index, so the output is a valid
/// triangulation for any distinct full-dimensional input.
pub fn build_delaunay(points: &PointSet) -> Result<Triangulation> {
    build::build(points)
}

impl Triangulation {
    /// Reassembles a triangulation from bare simplex vertex lists, e.g.
    /// when loading a serialized model. Neighbor, hull and incidence
    /// tables are derived; simplices are canonicalized exactly like the
    /// builder output.
    pub fn from_simplices(points: &PointSet, simplices: Vec<Vec<usize>>) -> Result<Self> {
        let dim = points.dim();
        let mut lists = simplices;
        for verts in &mut lists {
            if verts.len() != dim + 1 {
                return Err(Error::InvalidInput(
                    "each simplex needs exactly p+1 vertices".to_string(),
                ));
            }
            verts.sort_unstable();
            if verts.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInput("repeated vertex in simplex".to_string()));
            }
            if *verts.last().unwrap() >= points.len() {
                return Err(Error::InvalidInput("simplex vertex id out of range".to_string()));
            }
        }
        lists.sort();
        assemble(points, lists)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn num_simplices(&self) -> usize {
        self.simplices.len()
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn simplex(&self, id: usize) -> &Simplex {
        &self.simplices[id]
    }

    /// Convex-hull facets as `(simplex_id, facet_index)` pairs.
    pub fn hull_facets(&self) -> &[(usize, usize)] {
        &self.hull_facets
    }

    /// Ids of the simplices incident to vertex `v` (the set N(v)).
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.vertex_to_incident[v]
    }

    fn simplex_points<'a>(&self, points: &'a PointSet, id: usize) -> Vec<&'a [f64]> {
        self.simplices[id].vertex_ids.iter().map(|&v| points.point(v)).collect()
    }

    /// Exact closure-containment test against one simplex.
    fn contains(&self, points: &PointSet, id: usize, query: &[f64]) -> bool {
        let cell = &self.simplices[id];
        for k in 0..cell.vertex_ids.len() {
            let facet: Vec<&[f64]> = cell
                .vertex_ids
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &v)| points.point(v))
                .collect();
            let mut with_q = facet.clone();
            with_q.push(query);
            let s_q = predicates::orient_unchecked(&with_q);
            if s_q.is_zero() {
                continue;
            }
            let mut with_v = facet;
            with_v.push(points.point(cell.vertex_ids[k]));
            if s_q != predicates::orient_unchecked(&with_v) {
                return false;
            }
        }
        true
    }

    /// Locates the query: the covering simplex with barycentric
    /// coordinates inside the hull, the nearest vertex outside.
    ///
    /// Queries on shared faces are assigned to the lowest-id simplex whose
    /// closure contains them, independent of the walk path.
    pub fn locate(&self, points: &PointSet, query: &[f64]) -> Result<LocateResult> {
        points.check_query(query)?;
        let found = match self.walk(points, query) {
            WalkOutcome::Found(id) => id,
            WalkOutcome::Outside => {
                return Ok(LocateResult::OutsideHull { nearest_vertex: points.nearest(query)? })
            }
            WalkOutcome::GaveUp => {
                match (0..self.simplices.len()).find(|&id| self.contains(points, id, query)) {
                    Some(id) => id,
                    None => {
                        return Ok(LocateResult::OutsideHull {
                            nearest_vertex: points.nearest(query)?,
                        })
                    }
                }
            }
        };
        let id = self.resolve_boundary(points, found, query);
        let pts = self.simplex_points(points, id);
        let mut bary = predicates::solve_barycentric_unchecked(&pts, query)?;
        for b in &mut bary {
            if *b <= 0.0 && *b >= -1e-12 {
                *b = 0.0;
            }
        }
        let sum: f64 = bary.iter().sum();
        for b in &mut bary {
            *b /= sum;
        }
        Ok(LocateResult::InsideSimplex { simplex: id, barycentric: bary })
    }

    fn walk(&self, points: &PointSet, query: &[f64]) -> WalkOutcome {
        let mut current = 0usize;
        let max_hops = 4 * self.simplices.len() + 16;
        let mut hops = 0;
        'walk: while hops <= max_hops {
            hops += 1;
            let cell = &self.simplices[current];
            for k in 0..cell.vertex_ids.len() {
                let facet: Vec<&[f64]> = cell
                    .vertex_ids
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, &v)| points.point(v))
                    .collect();
                let mut with_q = facet.clone();
                with_q.push(query);
                let s_q = predicates::orient_unchecked(&with_q);
                if s_q.is_zero() {
                    continue;
                }
                let mut with_v = facet;
                with_v.push(points.point(cell.vertex_ids[k]));
                if s_q != predicates::orient_unchecked(&with_v) {
                    match cell.neighbor_ids[k] {
                        // strictly beyond a hull facet: outside the hull
                        None => return WalkOutcome::Outside,
                        Some(nb) => {
                            current = nb;
                            continue 'walk;
                        }
                    }
                }
            }
            return WalkOutcome::Found(current);
        }
        WalkOutcome::GaveUp
    }

    /// For queries touching a shared face, returns the lowest-id incident
    /// simplex containing the query; otherwise returns `found` unchanged.
    fn resolve_boundary(&self, points: &PointSet, found: usize, query: &[f64]) -> usize {
        let on_face = self.simplices[found].vertex_ids.iter().enumerate().any(|(k, _)| {
            let facet: Vec<&[f64]> = self.simplices[found]
                .vertex_ids
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &v)| points.point(v))
                .collect();
            let mut with_q = facet.clone();
            with_q.push(query);
            predicates::orient_unchecked(&with_q).is_zero()
        });
        if !on_face {
            return found;
        }
        let mut best = found;
        let mut stack = vec![found];
        let mut seen = vec![found];
        while let Some(c) = stack.pop() {
            let cell = &self.simplices[c];
            for k in 0..cell.vertex_ids.len() {
                let Some(nb) = cell.neighbor_ids[k] else { continue };
                if seen.contains(&nb) {
                    continue;
                }
                let facet: Vec<&[f64]> = cell
                    .vertex_ids
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, &v)| points.point(v))
                    .collect();
                let mut with_q = facet.clone();
                with_q.push(query);
                if predicates::orient_unchecked(&with_q).is_zero() {
                    seen.push(nb);
                    stack.push(nb);
                    best = best.min(nb);
                }
            }
        }
        best
    }

    /// True iff the query lies inside or on the convex hull, decided with
    /// exact predicates on the hull facets.
    pub fn hull_contains(&self, points: &PointSet, query: &[f64]) -> Result<bool> {
        points.check_query(query)?;
        for &(cell_id, k) in &self.hull_facets {
            let cell = &self.simplices[cell_id];
            let facet: Vec<&[f64]> = cell
                .vertex_ids
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &v)| points.point(v))
                .collect();
            let mut with_q = facet.clone();
            with_q.push(query);
            let s_q = predicates::orient_unchecked(&with_q);
            if s_q.is_zero() {
                continue;
            }
            let mut with_v = facet;
            with_v.push(points.point(cell.vertex_ids[k]));
            if s_q != predicates::orient_unchecked(&with_v) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Average edge length of the covering simplex, or the nearest-vertex
    /// distance for queries outside the hull.
    pub fn covering_edge_average(&self, points: &PointSet, query: &[f64]) -> Result<f64> {
        match self.locate(points, query)? {
            LocateResult::InsideSimplex { simplex, .. } => {
                let verts = &self.simplices[simplex].vertex_ids;
                let mut total = 0.0;
                let mut count = 0usize;
                for i in 0..verts.len() {
                    for j in i + 1..verts.len() {
                        total += math::dist(points.point(verts[i]), points.point(verts[j]));
                        count += 1;
                    }
                }
                Ok(total / count as f64)
            }
            LocateResult::OutsideHull { nearest_vertex } => {
                Ok(math::dist(points.point(nearest_vertex), query))
            }
        }
    }

    /// Total volume of the simplices.
    pub fn total_simplex_volume(&self, points: &PointSet) -> f64 {
        self.simplices
            .iter()
            .map(|s| simplex_volume(points, &s.vertex_ids))
            .sum()
    }

    /// Hull volume computed independently from the hull facets, as the sum
    /// of pyramid volumes over an interior point (the point centroid).
    pub fn hull_volume(&self, points: &PointSet) -> f64 {
        let p = self.dim;
        let mut centroid = vec![0.0; p];
        for pt in points.iter() {
            for (c, x) in centroid.iter_mut().zip(pt) {
                *c += x;
            }
        }
        for c in &mut centroid {
            *c /= points.len() as f64;
        }
        let mut volume = 0.0;
        for &(cell_id, k) in &self.hull_facets {
            let cell = &self.simplices[cell_id];
            let facet: Vec<&[f64]> = cell
                .vertex_ids
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &v)| points.point(v))
                .collect();
            let mut m = Vec::with_capacity(p * p);
            for f in &facet {
                for col in 0..p {
                    m.push(f[col] - centroid[col]);
                }
            }
            let (det, _) = crate::linalg::det_with_permanent(&m, p);
            volume += math::abs(det);
        }
        volume / factorial(p)
    }

    /// Checks that the simplices form a valid partition of the hull:
    /// positive orientations, consistent facet pairing with a closed hull
    /// boundary, and total volume matching the hull volume.
    pub fn validate_partition(&self, points: &PointSet) -> Result<()> {
        for s in &self.simplices {
            let pts: Vec<&[f64]> = s.vertex_ids.iter().map(|&v| points.point(v)).collect();
            if predicates::orient_unchecked(&pts) != Sign::Positive {
                return Err(Error::DegenerateSimplex);
            }
        }
        let total = self.total_simplex_volume(points);
        let hull = self.hull_volume(points);
        if math::abs(total - hull) > 1e-9 * hull.max(1e-300) {
            return Err(Error::InvalidInput(
                "simplex volumes do not sum to the hull volume".to_string(),
            ));
        }
        Ok(())
    }
}

enum WalkOutcome {
    Found(usize),
    Outside,
    GaveUp,
}

/// Volume of one simplex given its vertex ids.
pub fn simplex_volume(points: &PointSet, vertex_ids: &[usize]) -> f64 {
    let p = points.dim();
    debug_assert_eq!(vertex_ids.len(), p + 1);
    let v0 = points.point(vertex_ids[0]);
    let mut m = Vec::with_capacity(p * p);
    for &v in &vertex_ids[1..] {
        let pt = points.point(v);
        for col in 0..p {
            m.push(pt[col] - v0[col]);
        }
    }
    let (det, _) = crate::linalg::det_with_permanent(&m, p);
    math::abs(det) / factorial(p)
}

fn factorial(p: usize) -> f64 {
    (1..=p).map(|k| k as f64).product()
}

/// Canonicalizes sorted vertex lists into oriented simplices and derives
/// the neighbor, hull-facet and incidence tables. Shared by the builder
/// and by deserialization.
pub(crate) fn assemble(
    points: &PointSet,
    sorted_lists: Vec<Vec<usize>>,
) -> Result<Triangulation> {
    let dim = points.dim();
    let n_points = points.len();
    if sorted_lists.is_empty() {
        return Err(Error::InvalidInput("triangulation needs at least one simplex".to_string()));
    }
    let mut simplices = Vec::with_capacity(sorted_lists.len());
    for mut verts in sorted_lists {
        let pts: Vec<&[f64]> = verts.iter().map(|&v| points.point(v)).collect();
        match predicates::orient_unchecked(&pts) {
            Sign::Positive => {}
            Sign::Negative => {
                let len = verts.len();
                verts.swap(len - 2, len - 1);
            }
            Sign::Zero => return Err(Error::DegenerateSimplex),
        }
        simplices.push(Simplex { vertex_ids: verts, neighbor_ids: vec![None; dim + 1] });
    }

    // pair facets; a facet shared by more than two simplices is invalid
    let mut facets: Vec<(Vec<usize>, usize, usize)> = Vec::with_capacity(simplices.len() * (dim + 1));
    for (idx, s) in simplices.iter().enumerate() {
        for k in 0..=dim {
            let mut key: Vec<usize> = s
                .vertex_ids
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &v)| v)
                .collect();
            key.sort_unstable();
            facets.push((key, idx, k));
        }
    }
    facets.sort();
    let mut i = 0;
    while i < facets.len() {
        let mut j = i + 1;
        while j < facets.len() && facets[j].0 == facets[i].0 {
            j += 1;
        }
        match j - i {
            1 => {}
            2 => {
                let (_, a, ka) = &facets[i];
                let (_, b, kb) = &facets[i + 1];
                simplices[*a].neighbor_ids[*ka] = Some(*b);
                simplices[*b].neighbor_ids[*kb] = Some(*a);
            }
            _ => {
                return Err(Error::InvalidInput(
                    "facet shared by more than two simplices".to_string(),
                ))
            }
        }
        i = j;
    }

    let mut hull_facets: Vec<(usize, usize)> = Vec::new();
    for (idx, s) in simplices.iter().enumerate() {
        for (k, nb) in s.neighbor_ids.iter().enumerate() {
            if nb.is_none() {
                hull_facets.push((idx, k));
            }
        }
    }

    let mut vertex_to_incident = vec![Vec::new(); n_points];
    for (idx, s) in simplices.iter().enumerate() {
        for &v in &s.vertex_ids {
            vertex_to_incident[v].push(idx);
        }
    }

    Ok(Triangulation { dim, n_points, simplices, hull_facets, vertex_to_incident })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> PointSet {
        PointSet::from_rows(&[
            alloc::vec![0.0, 0.0],
            alloc::vec![1.0, 0.0],
            alloc::vec![0.0, 1.0],
            alloc::vec![1.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn unit_square_two_triangles() {
        let pts = square();
        let tri = build_delaunay(&pts).unwrap();
        assert_eq!(tri.num_simplices(), 2);
        // the four corners are cocircular; index perturbation picks the
        // diagonal between vertices 1 and 2
        let lists: Vec<Vec<usize>> = tri
            .simplices()
            .iter()
            .map(|s| {
                let mut v = s.vertex_ids().to_vec();
                v.sort_unstable();
                v
            })
            .collect();
        assert_eq!(lists, alloc::vec![alloc::vec![0, 1, 2], alloc::vec![1, 2, 3]]);
        // 5 distinct edges
        let mut edges = alloc::collections::BTreeSet::new();
        for s in tri.simplices() {
            let v = s.vertex_ids();
            for i in 0..3 {
                for j in i + 1..3 {
                    edges.insert((v[i].min(v[j]), v[i].max(v[j])));
                }
            }
        }
        assert_eq!(edges.len(), 5);
        tri.validate_partition(&pts).unwrap();
        // empty circumsphere against all four corners
        for s in tri.simplices() {
            let spts: Vec<&[f64]> = s.vertex_ids().iter().map(|&v| pts.point(v)).collect();
            for v in 0..4 {
                if s.vertex_ids().contains(&v) {
                    continue;
                }
                let r = predicates::in_circumsphere(&spts, pts.point(v)).unwrap();
                assert_ne!(r, Sign::Positive);
            }
        }
    }

    #[test]
    fn one_dimensional_chain() {
        let pts = PointSet::from_rows(&[
            alloc::vec![0.3],
            alloc::vec![0.9],
            alloc::vec![0.1],
        ])
        .unwrap();
        let tri = build_delaunay(&pts).unwrap();
        assert_eq!(tri.num_simplices(), 2);
        let lists: Vec<Vec<usize>> =
            tri.simplices().iter().map(|s| s.vertex_ids().to_vec()).collect();
        // segments [0.1, 0.3] and [0.3, 0.9]
        assert!(lists.contains(&alloc::vec![2, 0]) || lists.contains(&alloc::vec![0, 2]));
        assert!(lists.contains(&alloc::vec![0, 1]) || lists.contains(&alloc::vec![1, 0]));
        tri.validate_partition(&pts).unwrap();
    }

    #[test]
    fn duplicate_points_rejected() {
        let pts = PointSet::from_rows(&[
            alloc::vec![0.0, 0.0],
            alloc::vec![1.0, 0.0],
            alloc::vec![0.0, 1.0],
            alloc::vec![1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(build_delaunay(&pts).unwrap_err(), Error::DuplicatePoints(1, 3));
    }

    #[test]
    fn degenerate_input_rejected() {
        let pts = PointSet::from_rows(&[
            alloc::vec![0.0, 0.0],
            alloc::vec![1.0, 1.0],
            alloc::vec![2.0, 2.0],
            alloc::vec![3.0, 3.0],
        ])
        .unwrap();
        assert_eq!(build_delaunay(&pts).unwrap_err(), Error::DegenerateInput);
    }

    #[test]
    fn locate_square() {
        let pts = square();
        let tri = build_delaunay(&pts).unwrap();
        // a training point locates onto itself
        let r = tri.locate(&pts, &[0.0, 0.0]).unwrap();
        let LocateResult::InsideSimplex { barycentric, simplex } = r else {
            panic!("vertex must be inside the hull")
        };
        let verts = tri.simplex(simplex).vertex_ids();
        for (l, &v) in barycentric.iter().zip(verts) {
            let expect = if v == 0 { 1.0 } else { 0.0 };
            assert!((l - expect).abs() < 1e-12);
        }
        // the diagonal midpoint touches both triangles: lowest id wins
        let r = tri.locate(&pts, &[0.5, 0.5]).unwrap();
        let LocateResult::InsideSimplex { simplex, barycentric } = r else {
            panic!("inside");
        };
        assert_eq!(simplex, 0);
        assert!(barycentric.iter().any(|&l| l == 0.0));
        assert!((barycentric.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // far outside
        let r = tri.locate(&pts, &[10.0, 10.0]).unwrap();
        assert_eq!(r, LocateResult::OutsideHull { nearest_vertex: 3 });
    }

    #[test]
    fn hull_contains_square() {
        let pts = square();
        let tri = build_delaunay(&pts).unwrap();
        assert!(tri.hull_contains(&pts, &[0.0, 0.0]).unwrap());
        assert!(tri.hull_contains(&pts, &[0.5, 0.5]).unwrap());
        assert!(tri.hull_contains(&pts, &[1.0, 0.5]).unwrap()); // on an edge
        assert!(!tri.hull_contains(&pts, &[1.1, 0.5]).unwrap());
    }

    #[test]
    fn covering_edge_average_cases() {
        // p = 1: covering segment length
        let pts = PointSet::from_rows(&[
            alloc::vec![0.1],
            alloc::vec![0.3],
            alloc::vec![0.9],
        ])
        .unwrap();
        let tri = build_delaunay(&pts).unwrap();
        let t = tri.covering_edge_average(&pts, &[0.2]).unwrap();
        assert!((t - 0.2).abs() < 1e-12);
        // outside the hull: nearest-vertex distance
        let t = tri.covering_edge_average(&pts, &[1.4]).unwrap();
        assert!((t - 0.5).abs() < 1e-12);
    }

    #[test]
    fn square_flip_gives_other_diagonal() {
        let pts = square();
        let tri0 = random_triangulation(&pts, 0, 7).unwrap();
        assert_eq!(tri0, build_delaunay(&pts).unwrap());
        let tri1 = random_triangulation(&pts, 1, 7).unwrap();
        let lists: Vec<Vec<usize>> = tri1
            .simplices()
            .iter()
            .map(|s| {
                let mut v = s.vertex_ids().to_vec();
                v.sort_unstable();
                v
            })
            .collect();
        assert_eq!(lists, alloc::vec![alloc::vec![0, 1, 3], alloc::vec![0, 2, 3]]);
        tri1.validate_partition(&pts).unwrap();
    }

    #[test]
    fn from_simplices_roundtrip() {
        let pts = square();
        let tri = build_delaunay(&pts).unwrap();
        let lists: Vec<Vec<usize>> =
            tri.simplices().iter().map(|s| s.vertex_ids().to_vec()).collect();
        let rebuilt = Triangulation::from_simplices(&pts, lists).unwrap();
        assert_eq!(tri, rebuilt);
    }
}
