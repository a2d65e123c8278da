//! Uniform spatial binning of ball centers.
//!
//! The grid is never materialized: balls are sorted by the row-major index of
//! their cell (x fastest) and only occupied cells get an entry mapping to a
//! contiguous range of that sorted order.

use std::collections::HashMap;
use std::ops::Range;

use rayon::prelude::*;

use crate::error::AlphaError;
use crate::geometry::{Ball, Vec3};

/// Per-axis cell coordinates. Ordered like the row-major linear index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    pub iz: u32,
    pub iy: u32,
    pub ix: u32,
}

impl CellKey {
    pub fn new(ix: u32, iy: u32, iz: u32) -> Self {
        Self { iz, iy, ix }
    }
}

#[derive(Debug, Clone)]
pub struct Grid {
    origin: Vec3,
    cell_side: f64,
    dims: [u32; 3],
    order: Vec<u32>,
    rank: Vec<u32>,
    cell_ranges: HashMap<CellKey, Range<u32>>,
}

/// Largest supported cell count along one axis.
const MAX_AXIS_CELLS: f64 = (u32::MAX / 2) as f64;

/// Bins `balls` into cells of side `√(r_max² + α)`.
///
/// Ball `i` of the slice must carry index `i`.
pub fn build_grid(balls: &[Ball], alpha: f64) -> Result<Grid, AlphaError> {
    if balls.is_empty() {
        return Err(AlphaError::EmptyInput);
    }
    if let Some(b) = balls
        .iter()
        .find(|b| !(b.center.iter().all(|c| c.is_finite()) && b.radius.is_finite()))
    {
        return Err(AlphaError::NonFiniteCoordinate { index: b.index });
    }
    let r_max = balls.iter().map(|b| b.radius).fold(0.0f64, f64::max);
    let side2 = r_max * r_max + alpha;
    if !(side2 > 0.0 && side2.is_finite()) {
        return Err(AlphaError::InvalidParameter(format!(
            "grid cell side² = r_max² + α = {side2} must be positive and finite"
        )));
    }
    let cell_side = side2.sqrt();

    let mut origin = [f64::INFINITY; 3];
    let mut upper = [f64::NEG_INFINITY; 3];
    for b in balls {
        for a in 0..3 {
            origin[a] = origin[a].min(b.center[a]);
            upper[a] = upper[a].max(b.center[a]);
        }
    }
    let mut dims = [1u32; 3];
    for a in 0..3 {
        let cells = ((upper[a] - origin[a]) / cell_side).floor() + 1.0;
        if cells > MAX_AXIS_CELLS {
            return Err(AlphaError::InvalidParameter(format!(
                "grid would need {cells} cells along axis {a}; input is too sparse for cell side {cell_side}"
            )));
        }
        dims[a] = cells as u32;
    }

    let mut grid = Grid {
        origin,
        cell_side,
        dims,
        order: Vec::new(),
        rank: Vec::new(),
        cell_ranges: HashMap::new(),
    };

    let mut keyed: Vec<(CellKey, u32)> = balls
        .par_iter()
        .map(|b| (grid.cell_of(b.center), b.index))
        .collect();
    keyed.par_sort_unstable();

    let mut rank = vec![0u32; balls.len()];
    for (pos, &(_, idx)) in keyed.iter().enumerate() {
        rank[idx as usize] = pos as u32;
    }
    let mut cell_ranges = HashMap::new();
    let mut start = 0usize;
    for pos in 1..=keyed.len() {
        if pos == keyed.len() || keyed[pos].0 != keyed[start].0 {
            cell_ranges.insert(keyed[start].0, start as u32..pos as u32);
            start = pos;
        }
    }
    grid.order = keyed.into_iter().map(|(_, i)| i).collect();
    grid.rank = rank;
    grid.cell_ranges = cell_ranges;
    Ok(grid)
}

impl Grid {
    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn cell_side(&self) -> f64 {
        self.cell_side
    }

    pub fn dims(&self) -> [u32; 3] {
        self.dims
    }

    /// Ball indices sorted by (cell key, ball index).
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// Position of ball `index` in [`Grid::order`].
    #[inline]
    pub fn rank(&self, index: u32) -> u32 {
        self.rank[index as usize]
    }

    pub fn occupied_cells(&self) -> usize {
        self.cell_ranges.len()
    }

    /// Ball indices stored in one cell, ascending.
    pub fn cell_members(&self, key: CellKey) -> &[u32] {
        match self.cell_ranges.get(&key) {
            Some(r) => &self.order[r.start as usize..r.end as usize],
            None => &[],
        }
    }

    /// Per-axis `floor((p − origin) / cell_side)`, clamped into the grid.
    pub fn cell_of(&self, p: Vec3) -> CellKey {
        let axis = |a: usize| {
            let f = ((p[a] - self.origin[a]) / self.cell_side).floor();
            if f.is_nan() || f < 0.0 {
                0
            } else {
                (f.min((self.dims[a] - 1) as f64)) as u32
            }
        };
        CellKey::new(axis(0), axis(1), axis(2))
    }

    /// Balls whose cell differs from `key` by at most `radius_cells` on every
    /// axis, in ascending (cell key, ball index) order.
    pub fn neighborhood(&self, key: CellKey, radius_cells: u32) -> impl Iterator<Item = u32> + '_ {
        let span =
            |c: u32, dim: u32| c.saturating_sub(radius_cells)..=(c + radius_cells).min(dim - 1);
        let xs = span(key.ix, self.dims[0]);
        let ys = span(key.iy, self.dims[1]);
        let zs = span(key.iz, self.dims[2]);
        zs.flat_map(move |iz| {
            let xs = xs.clone();
            ys.clone()
                .flat_map(move |iy| xs.clone().map(move |ix| CellKey::new(ix, iy, iz)))
        })
        .flat_map(move |k| self.cell_members(k).iter().copied())
    }
}
