//! Valid but generally non-Delaunay triangulations, used as comparison
//! baselines for the geometric-loss experiments.

use alloc::string::ToString;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::point::PointSet;
use crate::predicates::{self, Sign};

use super::{assemble, build_delaunay, LocateResult, Triangulation};

/// Builds a valid triangulation of the same hull that is generally not
/// Delaunay: the Delaunay mesh followed by `flips` random legal edge flips
/// for p = 2, or randomized incremental insertion without Delaunay repair
/// for p >= 3. For p = 1 the chain is the only triangulation and is
/// returned as is. Deterministic given the seed.
pub fn random_triangulation(points: &PointSet, flips: usize, seed: u64) -> Result<Triangulation> {
    let p = points.dim();
    let delaunay = build_delaunay(points)?;
    if p == 1 || flips == 0 {
        return Ok(delaunay);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if p == 2 {
        random_flips(points, delaunay, flips, &mut rng)
    } else {
        random_insertion(points, &delaunay, &mut rng)
    }
}

fn random_flips(
    points: &PointSet,
    mut tri: Triangulation,
    flips: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Triangulation> {
    for _ in 0..flips {
        let legal = legal_flips(points, &tri);
        if legal.is_empty() {
            break;
        }
        let &(cell, slot) = legal.choose(rng).expect("non-empty");
        let mut lists: Vec<Vec<usize>> = tri
            .simplices()
            .iter()
            .map(|s| s.vertex_ids().to_vec())
            .collect();
        let (a_new, b_new) = flipped_pair(&tri, cell, slot);
        let other = tri.simplex(cell).neighbor_ids()[slot].expect("interior edge");
        lists[cell] = a_new;
        lists[other] = b_new;
        for l in &mut lists {
            l.sort_unstable();
        }
        lists.sort();
        tri = assemble(points, lists)?;
    }
    Ok(tri)
}

/// Interior edges whose surrounding quad is strictly convex, enumerated in
/// deterministic (cell, slot) order with each edge listed once.
fn legal_flips(points: &PointSet, tri: &Triangulation) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (idx, s) in tri.simplices().iter().enumerate() {
        for (k, nb) in s.neighbor_ids().iter().enumerate() {
            let Some(nb) = *nb else { continue };
            if nb < idx {
                continue;
            }
            let apex_a = s.vertex_ids()[k];
            let edge: Vec<usize> =
                s.vertex_ids().iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &v)| v).collect();
            let apex_b = tri.simplex(nb)
                .vertex_ids()
                .iter()
                .copied()
                .find(|v| !edge.contains(v))
                .expect("neighbor shares the edge");
            let sa = predicates::orient_unchecked(&[
                points.point(apex_a),
                points.point(apex_b),
                points.point(edge[0]),
            ]);
            let sb = predicates::orient_unchecked(&[
                points.point(apex_a),
                points.point(apex_b),
                points.point(edge[1]),
            ]);
            if !sa.is_zero() && !sb.is_zero() && sa != sb {
                out.push((idx, k));
            }
        }
    }
    out
}

fn flipped_pair(tri: &Triangulation, cell: usize, slot: usize) -> (Vec<usize>, Vec<usize>) {
    let s = tri.simplex(cell);
    let apex_a = s.vertex_ids()[slot];
    let edge: Vec<usize> =
        s.vertex_ids().iter().enumerate().filter(|&(i, _)| i != slot).map(|(_, &v)| v).collect();
    let nb = s.neighbor_ids()[slot].expect("interior edge");
    let apex_b = tri.simplex(nb)
        .vertex_ids()
        .iter()
        .copied()
        .find(|v| !edge.contains(v))
        .expect("neighbor shares the edge");
    (alloc::vec![apex_a, apex_b, edge[0]], alloc::vec![apex_a, apex_b, edge[1]])
}

/// Hull vertices first (their Delaunay mesh covers the hull), then the
/// interior points in random order, each splitting its covering simplex
/// without any Delaunay repair.
fn random_insertion(
    points: &PointSet,
    delaunay: &Triangulation,
    rng: &mut ChaCha8Rng,
) -> Result<Triangulation> {
    let p = points.dim();
    let mut is_hull = alloc::vec![false; points.len()];
    for &(cell, k) in delaunay.hull_facets() {
        for (i, &v) in delaunay.simplex(cell).vertex_ids().iter().enumerate() {
            if i != k {
                is_hull[v] = true;
            }
        }
    }
    let hull_ids: Vec<usize> = (0..points.len()).filter(|&v| is_hull[v]).collect();
    let mut interior: Vec<usize> = (0..points.len()).filter(|&v| !is_hull[v]).collect();
    interior.shuffle(rng);

    let mut lists: Vec<Vec<usize>> = if hull_ids.len() == p + 1 {
        alloc::vec![hull_ids.clone()]
    } else {
        let rows: Vec<Vec<f64>> = hull_ids.iter().map(|&v| points.point(v).to_vec()).collect();
        let sub = PointSet::from_rows(&rows)?;
        let sub_tri = build_delaunay(&sub)?;
        sub_tri
            .simplices()
            .iter()
            .map(|s| s.vertex_ids().iter().map(|&v| hull_ids[v]).collect())
            .collect()
    };

    for q_id in interior {
        for l in &mut lists {
            l.sort_unstable();
        }
        lists.sort();
        let tri = assemble(points, lists.clone())?;
        let q = points.point(q_id);
        let LocateResult::InsideSimplex { simplex, .. } = tri.locate(points, q)? else {
            return Err(Error::Unsupported(
                "interior point located outside the partial hull".to_string(),
            ));
        };
        let cell_verts = tri.simplex(simplex).vertex_ids().to_vec();
        // count facets whose hyperplane contains q, decided exactly
        let mut zero_slots = Vec::new();
        for k in 0..cell_verts.len() {
            let facet: Vec<&[f64]> = cell_verts
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &v)| points.point(v))
                .collect();
            let mut with_q = facet.clone();
            with_q.push(q);
            if predicates::orient_unchecked(&with_q) == Sign::Zero {
                zero_slots.push(k);
            }
        }
        match zero_slots.len() {
            0 => {
                // interior split: replace the cell by p+1 cells around q
                let mut cell_sorted = cell_verts.clone();
                cell_sorted.sort_unstable();
                let removed = lists.iter().position(|l| *l == cell_sorted).expect("cell present");
                lists.swap_remove(removed);
                for k in 0..cell_verts.len() {
                    let mut verts: Vec<usize> = cell_verts
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != k)
                        .map(|(_, &v)| v)
                        .collect();
                    verts.push(q_id);
                    lists.push(verts);
                }
            }
            1 => {
                // facet split: both incident cells are divided
                let k = zero_slots[0];
                let nb = tri.simplex(simplex).neighbor_ids()[k].ok_or_else(|| {
                    Error::Unsupported("interior point on a hull facet".to_string())
                })?;
                let facet: Vec<usize> = cell_verts
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, &v)| v)
                    .collect();
                for cell_id in [simplex, nb] {
                    let verts = tri.simplex(cell_id).vertex_ids().to_vec();
                    let apex = *verts.iter().find(|v| !facet.contains(v)).expect("apex");
                    let mut sorted = verts.clone();
                    sorted.sort_unstable();
                    let removed = lists.iter().position(|l| *l == sorted).expect("cell present");
                    lists.swap_remove(removed);
                    for &w in &facet {
                        let mut new_verts: Vec<usize> =
                            facet.iter().copied().filter(|&v| v != w).collect();
                        new_verts.push(q_id);
                        new_verts.push(apex);
                        lists.push(new_verts);
                    }
                }
            }
            _ => {
                return Err(Error::Unsupported(
                    "point on a low-dimensional face during randomized insertion".to_string(),
                ))
            }
        }
    }

    for l in &mut lists {
        l.sort_unstable();
    }
    lists.sort();
    assemble(points, lists)
}
