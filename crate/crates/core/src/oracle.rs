//! Exhaustive reference construction and Size computation.
//!
//! Nothing here uses the grid: potential simplices come from plain nested
//! loops over ball indices and every witness test runs against all balls.
//! Intended for inputs of a few hundred balls.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::error::AlphaError;
use crate::geometry::{
    ac2_satisfied, ortho_of_key, Ball, OrthoResult, SimplexKey, TolerancePolicy, Vec3,
};
use crate::pipeline::AlphaComplex;

fn check_indices(balls: &[Ball]) -> Result<(), AlphaError> {
    match balls
        .iter()
        .enumerate()
        .find(|(pos, b)| b.index as usize != *pos)
    {
        Some((position, b)) => Err(AlphaError::IndexMismatch {
            position,
            index: b.index,
        }),
        None => Ok(()),
    }
}

fn witness_all(key: &SimplexKey, p: Vec3, balls: &[Ball], tol: &TolerancePolicy) -> bool {
    ac2_satisfied(key, p, balls, balls, tol)
}

fn first_error<T>(items: Vec<Result<T, AlphaError>>) -> Result<Vec<T>, AlphaError> {
    items.into_iter().collect()
}

/// Potential simplices of one dimension, found by extending each potential
/// simplex of the dimension below with every higher ball index.
///
/// Skipping extensions of non-potential leading faces is exact because
/// OrthoSize never decreases from a face to its cofacets.
fn extend_all(
    lower: &[SimplexKey],
    balls: &[Ball],
    alpha: f64,
    tol: &TolerancePolicy,
) -> Result<Vec<(SimplexKey, OrthoResult)>, AlphaError> {
    let n = balls.len() as u32;
    let found = lower
        .par_iter()
        .map(|face| {
            let last = *face.vertices().last().unwrap();
            let mut out = Vec::new();
            for v in last + 1..n {
                let key = face.with_vertex(v);
                let o = ortho_of_key(&key, balls, tol)?;
                if tol.le(o.ortho_size, alpha) {
                    out.push((key, o));
                }
            }
            Ok(out)
        })
        .collect();
    Ok(first_error(found)?.into_iter().flatten().collect())
}

/// Reference alpha complex with the general vertex rule.
pub fn naive_alpha_complex(
    balls: &[Ball],
    alpha: f64,
    tol: &TolerancePolicy,
) -> Result<AlphaComplex, AlphaError> {
    naive_alpha_complex_with(balls, alpha, tol, false)
}

/// Reference alpha complex; `biomolecule_mode` inserts every vertex.
pub fn naive_alpha_complex_with(
    balls: &[Ball],
    alpha: f64,
    tol: &TolerancePolicy,
    biomolecule_mode: bool,
) -> Result<AlphaComplex, AlphaError> {
    check_indices(balls)?;
    let n = balls.len() as u32;

    // Potential simplices: OrthoSize filter, dimension by dimension.
    let vertex_keys: Vec<SimplexKey> = (0..n).map(SimplexKey::vertex).collect();
    let edges = extend_all(&vertex_keys, balls, alpha, tol)?;
    let edge_keys: Vec<SimplexKey> = edges.iter().map(|(k, _)| *k).collect();
    let triangles = extend_all(&edge_keys, balls, alpha, tol)?;
    let tri_keys: Vec<SimplexKey> = triangles.iter().map(|(k, _)| *k).collect();
    let tets = extend_all(&tri_keys, balls, alpha, tol)?;

    // Tetrahedra need a witness at their ortho-center.
    let kept_tets: Vec<SimplexKey> = tets
        .par_iter()
        .filter(|(k, o)| witness_all(k, o.center, balls, tol))
        .map(|(k, _)| *k)
        .collect();

    // Triangles, then edges: inherit faces of kept cofacets, then test the
    // free ones.
    let keep_level = |cofaces: &[SimplexKey], potentials: &[(SimplexKey, OrthoResult)]| {
        let inherited: BTreeSet<SimplexKey> = cofaces.iter().flat_map(|s| s.facets()).collect();
        let free: Vec<SimplexKey> = potentials
            .par_iter()
            .filter(|(k, _)| !inherited.contains(k))
            .filter(|(k, o)| witness_all(k, o.center, balls, tol))
            .map(|(k, _)| *k)
            .collect();
        inherited.into_iter().chain(free).collect::<Vec<_>>()
    };
    let kept_tris = keep_level(&kept_tets, &triangles);
    let kept_edges = keep_level(&kept_tris, &edges);

    // Vertices: endpoints of kept edges, then free vertices as above.
    let endpoints: BTreeSet<SimplexKey> = kept_edges.iter().flat_map(|s| s.facets()).collect();
    let kept_vertices: Vec<SimplexKey> = vertex_keys
        .par_iter()
        .filter(|k| {
            if biomolecule_mode || endpoints.contains(k) {
                return true;
            }
            let b = &balls[k.vertices()[0] as usize];
            tol.le(-b.weight(), alpha) && witness_all(k, b.center, balls, tol)
        })
        .copied()
        .collect();

    Ok(AlphaComplex::from_simplices(
        balls.len(),
        alpha,
        kept_vertices
            .into_iter()
            .chain(kept_edges)
            .chain(kept_tris)
            .chain(kept_tets),
    ))
}

/// Size of a simplex and its closest witness. `size` is `+∞` (and the
/// witness absent) when the simplex has no witness at all, i.e. it is not in
/// the weighted Delaunay triangulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeResult {
    pub size: f64,
    pub witness: Option<Vec3>,
}

impl SizeResult {
    pub const NOT_DELAUNAY: SizeResult = SizeResult {
        size: f64::INFINITY,
        witness: None,
    };

    pub fn is_delaunay(&self) -> bool {
        self.size.is_finite()
    }
}

/// Memoizing Size evaluator over one ball set.
///
/// A simplex witnessed at its ortho-center has Size equal to its OrthoSize.
/// Otherwise its closest witness is the closest witness of some cofacet, so
/// the Size is the minimum over all one-ball extensions. A tetrahedron not
/// witnessed at its ortho-center has no witness.
pub struct SizeOracle<'a> {
    balls: &'a [Ball],
    tol: TolerancePolicy,
    memo: HashMap<SimplexKey, SizeResult>,
}

impl<'a> SizeOracle<'a> {
    pub fn new(balls: &'a [Ball], tol: TolerancePolicy) -> Result<Self, AlphaError> {
        check_indices(balls)?;
        Ok(Self {
            balls,
            tol,
            memo: HashMap::new(),
        })
    }

    pub fn size(&mut self, key: &SimplexKey) -> Result<SizeResult, AlphaError> {
        if let Some(r) = self.memo.get(key) {
            return Ok(*r);
        }
        let o = ortho_of_key(key, self.balls, &self.tol)?;
        let result = if witness_all(key, o.center, self.balls, &self.tol) {
            SizeResult {
                size: o.ortho_size,
                witness: Some(o.center),
            }
        } else if key.dim() == 3 {
            SizeResult::NOT_DELAUNAY
        } else {
            let mut best = SizeResult::NOT_DELAUNAY;
            for j in 0..self.balls.len() as u32 {
                if key.contains(j) {
                    continue;
                }
                let r = self.size(&key.with_vertex(j))?;
                if r.size < best.size {
                    best = r;
                }
            }
            best
        };
        self.memo.insert(*key, result);
        Ok(result)
    }
}

/// One-off [`SizeOracle::size`] query.
pub fn simplex_size(
    key: &SimplexKey,
    balls: &[Ball],
    tol: &TolerancePolicy,
) -> Result<SizeResult, AlphaError> {
    SizeOracle::new(balls, *tol)?.size(key)
}
