//! Incremental Bowyer-Watson construction.
//!
//! The working complex keeps one ghost cell per hull facet (the ghost
//! vertex plays the role of a point at infinity), so every facet is shared
//! by exactly two cells and hull growth needs no special casing. Conflicts
//! are decided with exact predicates plus index-ordered symbolic
//! perturbation, making the construction deterministic for any input,
//! including cospherical tie cases.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::point::PointSet;
use crate::predicates::{self, Sign};

use super::Triangulation;

pub(super) const GHOST: usize = usize::MAX;

pub(super) struct BuildCell {
    pub verts: Vec<usize>, // ghost vertex, when present, sits in the last slot
    pub neighbors: Vec<usize>,
    pub orientation: Sign, // exact orientation of finite cells, Zero for ghosts
    pub alive: bool,
}

impl BuildCell {
    fn is_ghost(&self) -> bool {
        *self.verts.last().unwrap() == GHOST
    }
}

struct Builder<'a> {
    points: &'a PointSet,
    dim: usize,
    cells: Vec<BuildCell>,
    // conflict memo, refreshed per insertion via an epoch stamp
    status: Vec<(u32, bool)>,
    epoch: u32,
    last_finite: usize,
}

pub(super) fn build(points: &PointSet) -> Result<Triangulation> {
    let p = points.dim();
    let n = points.len();
    if n < p + 2 {
        return Err(Error::InvalidInput(alloc::format!(
            "need at least p+2 = {} points, got {n}",
            p + 2
        )));
    }
    check_duplicates(points)?;
    let seed = find_initial_simplex(points)?;
    let mut b = Builder {
        points,
        dim: p,
        cells: Vec::new(),
        status: Vec::new(),
        epoch: 0,
        last_finite: 0,
    };
    b.init_complex(&seed);
    for id in 0..n {
        if seed.contains(&id) {
            continue;
        }
        b.insert(id);
    }
    finalize(points, &b.cells)
}

/// Exact duplicate detection via a coordinate sort.
fn check_duplicates(points: &PointSet) -> Result<()> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        let pa = points.point(a);
        let pb = points.point(b);
        for (x, y) in pa.iter().zip(pb) {
            match x.total_cmp(y) {
                core::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        core::cmp::Ordering::Equal
    });
    for w in order.windows(2) {
        if points.point(w[0]) == points.point(w[1]) {
            let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
            return Err(Error::DuplicatePoints(a, b));
        }
    }
    Ok(())
}

/// Lowest-index point tuple spanning the full ambient dimension.
fn find_initial_simplex(points: &PointSet) -> Result<Vec<usize>> {
    let p = points.dim();
    let mut chosen = vec![0usize];
    for i in 1..points.len() {
        if chosen.len() == p + 1 {
            break;
        }
        let mut pts: Vec<&[f64]> = chosen.iter().map(|&c| points.point(c)).collect();
        pts.push(points.point(i));
        if predicates::affine_rank(&pts) == chosen.len() + 1 {
            chosen.push(i);
        }
    }
    if chosen.len() < p + 1 {
        return Err(Error::DegenerateInput);
    }
    Ok(chosen)
}

impl<'a> Builder<'a> {
    fn pt(&self, id: usize) -> &'a [f64] {
        self.points.point(id)
    }

    fn cell_points(&self, cell: &BuildCell) -> Vec<&'a [f64]> {
        cell.verts.iter().map(|&v| self.pt(v)).collect()
    }

    fn finite_orientation(&self, verts: &[usize]) -> Sign {
        let pts: Vec<&[f64]> = verts.iter().map(|&v| self.pt(v)).collect();
        predicates::orient_unchecked(&pts)
    }

    fn init_complex(&mut self, seed: &[usize]) {
        let p = self.dim;
        let orientation = self.finite_orientation(seed);
        debug_assert!(!orientation.is_zero());
        self.cells.push(BuildCell {
            verts: seed.to_vec(),
            neighbors: vec![0; p + 1],
            orientation,
            alive: true,
        });
        for k in 0..=p {
            let mut verts: Vec<usize> =
                seed.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &v)| v).collect();
            verts.push(GHOST);
            self.cells.push(BuildCell {
                verts,
                neighbors: vec![0; p + 1],
                orientation: Sign::Zero,
                alive: true,
            });
        }
        link_all(&mut self.cells);
        self.last_finite = 0;
    }

    /// Conflict ("the new point lies inside this cell's circumsphere"),
    /// with the ghost-cell circumsphere read as the outer halfspace of its
    /// hull facet, closed by the facet's own sphere on ties.
    fn in_conflict(&mut self, cell_idx: usize, q: &[f64], q_id: usize) -> bool {
        if self.status[cell_idx].0 == self.epoch {
            return self.status[cell_idx].1;
        }
        let cell = &self.cells[cell_idx];
        let answer = if cell.is_ghost() {
            let p = self.dim;
            let facet_ids = &cell.verts[..p];
            let facet: Vec<&[f64]> = facet_ids.iter().map(|&v| self.pt(v)).collect();
            let interior = cell.neighbors[p];
            let apex_id = self.cells[interior]
                .verts
                .iter()
                .copied()
                .find(|v| !facet_ids.contains(v))
                .expect("interior cell shares the hull facet");
            let mut with_q = facet.clone();
            with_q.push(q);
            let s_q = predicates::orient_unchecked(&with_q);
            if s_q.is_zero() {
                assert!(p >= 2, "coplanar ghost tie impossible for p = 1 with distinct points");
                predicates::facet_sphere_contains(&facet, facet_ids, q, q_id)
            } else {
                let mut with_apex = facet;
                with_apex.push(self.pt(apex_id));
                let s_a = predicates::orient_unchecked(&with_apex);
                s_q != s_a
            }
        } else {
            let pts = self.cell_points(cell);
            predicates::in_circumsphere_perturbed(&pts, &cell.verts, q, q_id, cell.orientation)
                == Sign::Positive
        };
        self.status[cell_idx] = (self.epoch, answer);
        answer
    }

    /// Visibility walk from the last finite cell, falling back to an
    /// exhaustive scan when the walk cycles or strands in ghost territory.
    fn find_seed(&mut self, q: &[f64], q_id: usize) -> usize {
        let mut current = self.last_finite;
        let max_hops = 4 * self.cells.len() + 16;
        let mut hops = 0;
        'walk: while hops <= max_hops {
            hops += 1;
            let cell = &self.cells[current];
            debug_assert!(cell.alive);
            if cell.is_ghost() {
                if self.in_conflict(current, q, q_id) {
                    return current;
                }
                break;
            }
            for k in 0..cell.verts.len() {
                let facet: Vec<&[f64]> = cell
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, &v)| self.pt(v))
                    .collect();
                let mut with_q = facet.clone();
                with_q.push(q);
                let s_q = predicates::orient_unchecked(&with_q);
                if s_q.is_zero() {
                    continue;
                }
                let mut with_v = facet;
                with_v.push(self.pt(cell.verts[k]));
                let s_v = predicates::orient_unchecked(&with_v);
                if s_q != s_v {
                    current = cell.neighbors[k];
                    continue 'walk;
                }
            }
            // q is in the closure of the current cell
            if self.in_conflict(current, q, q_id) {
                return current;
            }
            let neighbors = self.cells[current].neighbors.clone();
            for nb in neighbors {
                if self.in_conflict(nb, q, q_id) {
                    return nb;
                }
            }
            break;
        }
        for idx in 0..self.cells.len() {
            if self.cells[idx].alive && self.in_conflict(idx, q, q_id) {
                return idx;
            }
        }
        unreachable!("a distinct point always conflicts with some cell")
    }

    fn insert(&mut self, q_id: usize) {
        let q = self.pt(q_id);
        self.epoch += 1;
        self.status.resize(self.cells.len(), (0, false));
        let seed = self.find_seed(q, q_id);

        // flood fill over conflicting cells
        let mut cavity = vec![seed];
        let mut stack = vec![seed];
        let mut seen = vec![seed];
        while let Some(c) = stack.pop() {
            let neighbors = self.cells[c].neighbors.clone();
            for nb in neighbors {
                if seen.contains(&nb) {
                    continue;
                }
                seen.push(nb);
                if self.in_conflict(nb, q, q_id) {
                    cavity.push(nb);
                    stack.push(nb);
                }
            }
        }
        cavity.sort_unstable();

        // boundary facets: facets of cavity cells whose neighbor survives
        let p = self.dim;
        let mut new_cells: Vec<usize> = Vec::new();
        for &c in &cavity {
            for k in 0..=p {
                let nb = self.cells[c].neighbors[k];
                if cavity.binary_search(&nb).is_ok() {
                    continue;
                }
                let mut verts: Vec<usize> = self.cells[c]
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, &v)| v)
                    .collect();
                // keep the ghost vertex in the last slot of the new cell
                if let Some(pos) = verts.iter().position(|&v| v == GHOST) {
                    verts.remove(pos);
                    verts.push(q_id);
                    verts.push(GHOST);
                } else {
                    verts.push(q_id);
                }
                let q_slot = verts.iter().position(|&v| v == q_id).unwrap();
                let orientation = if verts.contains(&GHOST) {
                    Sign::Zero
                } else {
                    self.finite_orientation(&verts)
                };
                debug_assert!(verts.contains(&GHOST) || !orientation.is_zero());
                let mut neighbors = vec![usize::MAX; p + 1];
                neighbors[q_slot] = nb;
                let new_idx = self.cells.len();
                // rewire the surviving neighbor toward the new cell
                let back = self.cells[nb].neighbors.iter().position(|&x| x == c).unwrap();
                self.cells[nb].neighbors[back] = new_idx;
                self.cells.push(BuildCell { verts, neighbors, orientation, alive: true });
                new_cells.push(new_idx);
            }
        }
        for &c in &cavity {
            self.cells[c].alive = false;
        }

        // pair up the internal facets of the new star
        let mut open: Vec<(Vec<usize>, usize, usize)> = Vec::new();
        for &idx in &new_cells {
            for k in 0..=p {
                if self.cells[idx].neighbors[k] != usize::MAX {
                    continue;
                }
                let mut key: Vec<usize> = self.cells[idx]
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, &v)| v)
                    .collect();
                key.sort_unstable();
                if let Some(pos) = open.iter().position(|(f, _, _)| f == &key) {
                    let (_, other, other_slot) = open.swap_remove(pos);
                    self.cells[idx].neighbors[k] = other;
                    self.cells[other].neighbors[other_slot] = idx;
                } else {
                    open.push((key, idx, k));
                }
            }
        }
        debug_assert!(open.is_empty(), "cavity boundary must close up");

        self.last_finite = new_cells
            .iter()
            .copied()
            .rev()
            .find(|&i| !self.cells[i].is_ghost())
            .expect("every insertion creates a finite cell");
        self.status.resize(self.cells.len(), (0, false));
    }
}

/// Rebuilds every neighbor pointer from facet keys. Used for the initial
/// complex and by mesh-editing operations; insertion does local rewiring.
pub(super) fn link_all(cells: &mut [BuildCell]) {
    let mut open: Vec<(Vec<usize>, usize, usize)> = Vec::new();
    for idx in 0..cells.len() {
        if !cells[idx].alive {
            continue;
        }
        for k in 0..cells[idx].verts.len() {
            let mut key: Vec<usize> = cells[idx]
                .verts
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &v)| v)
                .collect();
            key.sort_unstable();
            if let Some(pos) = open.iter().position(|(f, _, _)| f == &key) {
                let (_, other, other_slot) = open.swap_remove(pos);
                cells[idx].neighbors[k] = other;
                cells[other].neighbors[other_slot] = idx;
            } else {
                open.push((key, idx, k));
            }
        }
    }
    debug_assert!(open.is_empty(), "ghost-padded complex has no unmatched facets");
}

/// Drops ghosts, canonicalizes vertex order and produces the public
/// triangulation with neighbor, hull and incidence tables.
pub(super) fn finalize(points: &PointSet, cells: &[BuildCell]) -> Result<Triangulation> {
    let mut vert_lists: Vec<Vec<usize>> = cells
        .iter()
        .filter(|c| c.alive && !c.is_ghost())
        .map(|c| c.verts.clone())
        .collect();
    for verts in &mut vert_lists {
        verts.sort_unstable();
    }
    vert_lists.sort();
    let tri = super::assemble(points, vert_lists)?;
    let mut covered = vec![false; points.len()];
    for s in tri.simplices() {
        for &v in s.vertex_ids() {
            covered[v] = true;
        }
    }
    if covered.iter().any(|&c| !c) {
        return Err(Error::DegenerateInput);
    }
    Ok(tri)
}
