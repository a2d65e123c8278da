//! Bottom-up enumeration of potential simplices (OrthoSize ≤ α).
//!
//! Every simplex is generated by exactly one owner: its vertex of lowest
//! rank in grid order. Edges come from radius-2 grid neighborhoods, triangles
//! from pairs of an owner's potential edges, and tetrahedra from an owner's
//! triangles extended by a higher-ranked vertex.

use std::collections::HashSet;
use std::ops::Range;

use rayon::prelude::*;

use crate::error::AlphaError;
use crate::geometry::{norm2, ortho_center, sub, Ball, OrthoResult, SimplexKey, TolerancePolicy};
use crate::grid::{CellKey, Grid};

/// Read-only state shared by every stage of one run.
pub(crate) struct Scene<'a> {
    pub balls: &'a [Ball],
    pub grid: &'a Grid,
    pub alpha: f64,
    pub tol: TolerancePolicy,
    /// `√(r² + α + eps)`, NaN when no simplex on the ball can be potential.
    reach: Vec<f64>,
    cells: Vec<CellKey>,
}

impl<'a> Scene<'a> {
    pub fn new(balls: &'a [Ball], grid: &'a Grid, alpha: f64, tol: TolerancePolicy) -> Self {
        let reach = balls
            .par_iter()
            .map(|b| (b.weight() + alpha + tol.eps_abs).sqrt())
            .collect();
        let cells = balls.par_iter().map(|b| grid.cell_of(b.center)).collect();
        Self {
            balls,
            grid,
            alpha,
            tol,
            reach,
            cells,
        }
    }

    #[inline]
    pub fn rank(&self, v: u32) -> u32 {
        self.grid.rank(v)
    }

    /// Rank of the simplex's owning vertex.
    pub fn owner_rank(&self, key: &SimplexKey) -> u32 {
        key.vertices().iter().map(|&v| self.rank(v)).min().unwrap()
    }

    #[inline]
    pub fn cell(&self, v: u32) -> CellKey {
        self.cells[v as usize]
    }

    #[inline]
    pub fn is_potential(&self, o: &OrthoResult) -> bool {
        self.tol.le(o.ortho_size, self.alpha)
    }

    fn ortho(&self, verts: &[u32]) -> Result<OrthoResult, AlphaError> {
        let mut refs = [&self.balls[verts[0] as usize]; 4];
        for (slot, &v) in refs.iter_mut().zip(verts) {
            *slot = &self.balls[v as usize];
        }
        ortho_center(&refs[..verts.len()], &self.tol)
    }

    /// Potential-edge test for a pair, with the center-distance pre-filter
    /// `‖p_a − p_b‖ ≤ √(r_a² + α) + √(r_b² + α)` and the radius-2 cell bound
    /// that edge enumeration relies on.
    pub fn edge_ortho(&self, a: u32, b: u32) -> Result<Option<OrthoResult>, AlphaError> {
        let (ca, cb) = (self.cell(a), self.cell(b));
        if ca.ix.abs_diff(cb.ix) > 2 || ca.iy.abs_diff(cb.iy) > 2 || ca.iz.abs_diff(cb.iz) > 2 {
            return Ok(None);
        }
        let limit = self.reach[a as usize] + self.reach[b as usize];
        let d2 = norm2(sub(
            self.balls[a as usize].center,
            self.balls[b as usize].center,
        ));
        // A NaN reach marks a ball too small to have any edge.
        if limit.is_nan() || d2 > limit * limit {
            return Ok(None);
        }
        let o = self.ortho(&[a, b])?;
        Ok(self.is_potential(&o).then_some(o))
    }

    pub fn simplex_ortho(&self, verts: &[u32]) -> Result<Option<OrthoResult>, AlphaError> {
        let o = self.ortho(verts)?;
        Ok(self.is_potential(&o).then_some(o))
    }
}

/// Potential edges owned by one ball, higher-ranked endpoints ascending.
#[derive(Debug, Clone)]
pub(crate) struct EdgeFan {
    pub owner: u32,
    pub nbrs: Vec<(u32, OrthoResult)>,
}

/// Potential triangles owned by one ball as `(b, c)` with `rank(b) < rank(c)`,
/// ordered lexicographically by rank.
#[derive(Debug, Clone)]
pub(crate) struct TriangleFan {
    pub owner: u32,
    pub tris: Vec<(u32, u32, OrthoResult)>,
}

fn first_error<T>(items: Vec<Result<T, AlphaError>>) -> Result<Vec<T>, AlphaError> {
    items.into_iter().collect()
}

/// Edges owned by the balls at grid-order positions `positions`.
pub(crate) fn owned_edges(
    scene: &Scene,
    positions: Range<usize>,
) -> Result<Vec<EdgeFan>, AlphaError> {
    let order = scene.grid.order();
    let fans = positions
        .into_par_iter()
        .map(|pos| {
            let a = order[pos];
            let mut nbrs = Vec::new();
            if scene.reach[a as usize].is_nan() {
                return Ok(EdgeFan { owner: a, nbrs });
            }
            // Neighborhood order is grid order, so `nbrs` comes out rank-sorted.
            for b in scene.grid.neighborhood(scene.cell(a), 2) {
                if scene.rank(b) as usize <= pos {
                    continue;
                }
                if let Some(o) = scene.edge_ortho(a, b)? {
                    nbrs.push((b, o));
                }
            }
            Ok(EdgeFan { owner: a, nbrs })
        })
        .collect();
    first_error(fans)
}

pub(crate) fn owned_triangles(
    scene: &Scene,
    fans: &[EdgeFan],
) -> Result<Vec<TriangleFan>, AlphaError> {
    let out = fans
        .par_iter()
        .map(|fan| {
            let a = fan.owner;
            let mut tris = Vec::new();
            for (i, &(b, _)) in fan.nbrs.iter().enumerate() {
                for &(c, _) in &fan.nbrs[i + 1..] {
                    if scene.edge_ortho(b, c)?.is_none() {
                        continue;
                    }
                    if let Some(o) = scene.simplex_ortho(&[a, b, c])? {
                        tris.push((b, c, o));
                    }
                }
            }
            Ok(TriangleFan { owner: a, tris })
        })
        .collect();
    first_error(out)
}

pub(crate) fn owned_tets(
    scene: &Scene,
    fans: &[TriangleFan],
) -> Result<Vec<(SimplexKey, OrthoResult)>, AlphaError> {
    let out = fans
        .par_iter()
        .map(|fan| {
            let a = fan.owner;
            let mut tets = Vec::new();
            if fan.tris.is_empty() {
                return Ok(tets);
            }
            let faces: HashSet<(u32, u32)> = fan.tris.iter().map(|&(b, c, _)| (b, c)).collect();
            let mut cands: Vec<u32> = fan.tris.iter().flat_map(|&(b, c, _)| [b, c]).collect();
            cands.sort_unstable_by_key(|&v| scene.rank(v));
            cands.dedup();
            for &(b, c, _) in &fan.tris {
                let rc = scene.rank(c);
                let start = cands.partition_point(|&v| scene.rank(v) <= rc);
                for &d in &cands[start..] {
                    if !faces.contains(&(b, d)) || !faces.contains(&(c, d)) {
                        continue;
                    }
                    if scene.simplex_ortho(&[b, c, d])?.is_none() {
                        continue;
                    }
                    if let Some(o) = scene.simplex_ortho(&[a, b, c, d])? {
                        tets.push((SimplexKey::tet(a, b, c, d), o));
                    }
                }
            }
            Ok(tets)
        })
        .collect();
    Ok(first_error(out)?.into_iter().flatten().collect())
}

pub(crate) fn flatten_edges(fans: &[EdgeFan]) -> Vec<(SimplexKey, OrthoResult)> {
    let mut v: Vec<_> = fans
        .iter()
        .flat_map(|f| {
            f.nbrs
                .iter()
                .map(move |&(b, o)| (SimplexKey::edge(f.owner, b), o))
        })
        .collect();
    v.par_sort_unstable_by(|x, y| x.0.cmp(&y.0));
    v
}

pub(crate) fn flatten_triangles(fans: &[TriangleFan]) -> Vec<(SimplexKey, OrthoResult)> {
    let mut v: Vec<_> = fans
        .iter()
        .flat_map(|f| {
            f.tris
                .iter()
                .map(move |&(b, c, o)| (SimplexKey::triangle(f.owner, b, c), o))
        })
        .collect();
    v.par_sort_unstable_by(|x, y| x.0.cmp(&y.0));
    v
}

/// Regroups a flat edge list by owning vertex, for every ball in grid order.
pub(crate) fn edge_fans_from_list(
    scene: &Scene,
    edges: &[(SimplexKey, OrthoResult)],
) -> Vec<EdgeFan> {
    let order = scene.grid.order();
    let mut fans: Vec<EdgeFan> = order
        .iter()
        .map(|&owner| EdgeFan {
            owner,
            nbrs: Vec::new(),
        })
        .collect();
    for &(key, o) in edges {
        let v = key.vertices();
        let (a, b) = if scene.rank(v[0]) < scene.rank(v[1]) {
            (v[0], v[1])
        } else {
            (v[1], v[0])
        };
        fans[scene.rank(a) as usize].nbrs.push((b, o));
    }
    for fan in &mut fans {
        fan.nbrs.sort_unstable_by_key(|&(b, _)| scene.rank(b));
    }
    fans
}

/// Regroups a flat triangle list by owning vertex, for every ball in grid order.
pub(crate) fn triangle_fans_from_list(
    scene: &Scene,
    tris: &[(SimplexKey, OrthoResult)],
) -> Vec<TriangleFan> {
    let order = scene.grid.order();
    let mut fans: Vec<TriangleFan> = order
        .iter()
        .map(|&owner| TriangleFan {
            owner,
            tris: Vec::new(),
        })
        .collect();
    for &(key, o) in tris {
        let mut v = [key.vertices()[0], key.vertices()[1], key.vertices()[2]];
        v.sort_unstable_by_key(|&x| scene.rank(x));
        fans[scene.rank(v[0]) as usize].tris.push((v[1], v[2], o));
    }
    for fan in &mut fans {
        fan.tris
            .sort_unstable_by_key(|&(b, c, _)| (scene.rank(b), scene.rank(c)));
    }
    fans
}
