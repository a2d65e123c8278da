//! Top-down pruning of potential simplices into the alpha complex.

use std::collections::BTreeSet;
use std::ops::Range;
use std::time::Instant;

use rayon::prelude::*;

use super::potential::Scene;
use super::{PotentialSets, StageTimings};
use crate::geometry::{ac2_satisfied, SimplexKey, Vec3};

/// Accepted simplices waiting for their owning chunk, keyed by owner rank.
///
/// A facet never has a lower owner rank than its cofacet, so a chunk only
/// ever hands work forward.
#[derive(Debug, Default)]
pub(crate) struct Pending {
    by_dim: [BTreeSet<(u32, SimplexKey)>; 3],
}

impl Pending {
    fn push_facets(&mut self, scene: &Scene, simplices: &[SimplexKey]) {
        for s in simplices {
            for f in s.facets() {
                self.by_dim[f.dim()].insert((scene.owner_rank(&f), f));
            }
        }
    }

    /// Removes and returns the entries owned by ranks below `end`, sorted.
    fn take_owned(&mut self, dim: usize, end: u32) -> Vec<SimplexKey> {
        let later = self.by_dim[dim].split_off(&(end, SimplexKey::vertex(0)));
        let owned = std::mem::replace(&mut self.by_dim[dim], later);
        let mut keys: Vec<_> = owned.into_iter().map(|(_, k)| k).collect();
        keys.sort_unstable();
        keys
    }

    pub fn is_empty(&self) -> bool {
        self.by_dim.iter().all(BTreeSet::is_empty)
    }
}

/// Witness test against the radius-1 neighborhood of the cell containing `p`.
fn witness_holds(scene: &Scene, key: &SimplexKey, p: Vec3) -> bool {
    let nbhd = scene
        .grid
        .neighborhood(scene.grid.cell_of(p), 1)
        .map(|i| &scene.balls[i as usize]);
    ac2_satisfied(key, p, nbhd, scene.balls, &scene.tol)
}

/// Merges two sorted, disjoint key lists.
fn merge_sorted(a: Vec<SimplexKey>, b: Vec<SimplexKey>) -> Vec<SimplexKey> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out.dedup();
    out
}

/// Keeps the free simplices (those not inherited from an accepted cofacet)
/// whose ortho-center witnesses them.
fn prune_free(
    scene: &Scene,
    potentials: &[(SimplexKey, crate::geometry::OrthoResult)],
    inherited: &[SimplexKey],
) -> Vec<SimplexKey> {
    potentials
        .par_iter()
        .filter(|(k, _)| inherited.binary_search(k).is_err())
        .filter(|(k, o)| witness_holds(scene, k, o.center))
        .map(|(k, _)| *k)
        .collect()
}

/// Runs the pruning steps for the simplices owned by grid-order positions
/// `owned`, whose potentials are `pots`.
///
/// Returns the accepted owned simplices of every dimension.
pub(crate) fn prune_chunk(
    scene: &Scene,
    pots: &PotentialSets,
    owned: Range<usize>,
    biomolecule_mode: bool,
    pending: &mut Pending,
    timings: &mut StageTimings,
) -> Vec<SimplexKey> {
    let end = owned.end as u32;

    let t = Instant::now();
    let tets: Vec<SimplexKey> = pots
        .tets
        .par_iter()
        .filter(|(k, o)| witness_holds(scene, k, o.center))
        .map(|(k, _)| *k)
        .collect();
    pending.push_facets(scene, &tets);
    timings.prune_tets += t.elapsed();

    let t = Instant::now();
    let inherited = pending.take_owned(2, end);
    let free = prune_free(scene, &pots.triangles, &inherited);
    let triangles = merge_sorted(inherited, free);
    pending.push_facets(scene, &triangles);
    timings.prune_triangles += t.elapsed();

    let t = Instant::now();
    let inherited = pending.take_owned(1, end);
    let free = prune_free(scene, &pots.edges, &inherited);
    let edges = merge_sorted(inherited, free);
    pending.push_facets(scene, &edges);

    let inherited = pending.take_owned(0, end);
    let order = scene.grid.order();
    let mut vertices: Vec<SimplexKey> = order[owned]
        .par_iter()
        .filter(|&&v| {
            if biomolecule_mode {
                return true;
            }
            let key = SimplexKey::vertex(v);
            if inherited.binary_search(&key).is_ok() {
                return true;
            }
            let b = &scene.balls[v as usize];
            scene.tol.le(-b.weight(), scene.alpha) && witness_holds(scene, &key, b.center)
        })
        .map(|&v| SimplexKey::vertex(v))
        .collect();
    vertices.sort_unstable();
    timings.prune_edges += t.elapsed();

    let mut out = vertices;
    out.extend(edges);
    out.extend(triangles);
    out.extend(tets);
    out
}
