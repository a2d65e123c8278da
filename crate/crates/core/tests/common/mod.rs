//! Instance generators and property checks shared by the integration tests
//! and the acceptance runner.

#![allow(dead_code)]

use alphax::geometry::{
    ac2_satisfied, ortho_of_key, power_distance, Ball, SimplexKey, TolerancePolicy,
};
use alphax::grid::build_grid;
use alphax::oracle::{naive_alpha_complex, SizeOracle};
use alphax::pipeline::{compute_alpha_complex, compute_potentials, AlphaComplex, PipelineConfig};
use alphax::random::RandomInstance;
use proptest::prelude::*;

/// A small random ball set together with an α to run it at.
#[derive(Debug, Clone)]
pub struct Case {
    pub balls: Vec<Ball>,
    pub alpha: f64,
}

/// Dense clusters of 4 to 16 balls so that triangles and tetrahedra show up
/// regularly, with α ranging from slightly negative to generous.
pub fn small_case() -> impl Strategy<Value = Case> {
    (
        4usize..=16,
        any::<u64>(),
        0.5f64..1.5,
        0.0f64..1.0,
        0.05f64..0.3,
        -0.5f64..4.0,
    )
        .prop_map(|(n, seed, lo, span, density, alpha)| {
            let inst = RandomInstance {
                min_sep: 0.8,
                radius_range: (lo, lo + span),
                density,
                ..RandomInstance::new(n, seed)
            };
            Case {
                balls: inst
                    .generate()
                    .expect("sampling stays below packing density"),
                alpha,
            }
        })
}

pub fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

pub fn grid_complex(balls: &[Ball], alpha: f64) -> AlphaComplex {
    compute_alpha_complex(balls, &PipelineConfig::new(alpha).with_workers(2)).expect("pipeline")
}

/// All simplices on up to four of the given balls, sorted.
pub fn all_simplices(n: u32) -> Vec<SimplexKey> {
    let mut out = Vec::new();
    for a in 0..n {
        out.push(SimplexKey::vertex(a));
        for b in a + 1..n {
            out.push(SimplexKey::edge(a, b));
            for c in b + 1..n {
                out.push(SimplexKey::triangle(a, b, c));
                for d in c + 1..n {
                    out.push(SimplexKey::tet(a, b, c, d));
                }
            }
        }
    }
    out
}

pub fn check_closure(c: &Case) -> Result<(), String> {
    let k = grid_complex(&c.balls, c.alpha);
    match k.missing_facets().first() {
        None => Ok(()),
        Some((s, f)) => Err(format!("{s:?} kept without facet {f:?}")),
    }
}

pub fn check_alpha_monotonicity(c: &Case, step: f64) -> Result<(), String> {
    let small = grid_complex(&c.balls, c.alpha);
    let large = grid_complex(&c.balls, c.alpha + step);
    if small.is_subcomplex_of(&large) {
        Ok(())
    } else {
        let lost: Vec<_> = small
            .iter()
            .filter(|s| !large.contains(s))
            .take(5)
            .collect();
        Err(format!("raising α by {step} dropped {lost:?}"))
    }
}

/// The ortho-ball of a face never exceeds that of its cofacets.
pub fn check_face_monotonicity(c: &Case) -> Result<(), String> {
    let t = tol();
    for s in all_simplices(c.balls.len() as u32)
        .iter()
        .filter(|s| s.dim() > 0)
    {
        let o = ortho_of_key(s, &c.balls, &t).map_err(|e| e.to_string())?;
        for f in s.facets() {
            let of = ortho_of_key(&f, &c.balls, &t).map_err(|e| e.to_string())?;
            if of.ortho_size > o.ortho_size + t.eps_abs {
                return Err(format!(
                    "{f:?} {} above cofacet {s:?} {}",
                    of.ortho_size, o.ortho_size
                ));
            }
        }
    }
    Ok(())
}

pub fn check_size_at_least_ortho_size(c: &Case) -> Result<(), String> {
    let t = tol();
    let mut oracle = SizeOracle::new(&c.balls, t).map_err(|e| e.to_string())?;
    for s in all_simplices(c.balls.len() as u32) {
        let size = oracle.size(&s).map_err(|e| e.to_string())?;
        let o = ortho_of_key(&s, &c.balls, &t).map_err(|e| e.to_string())?;
        if size.size < o.ortho_size - t.eps_abs {
            return Err(format!(
                "{s:?}: Size {} below OrthoSize {}",
                size.size, o.ortho_size
            ));
        }
        if let Some(w) = size.witness {
            let b0 = &c.balls[s.vertices()[0] as usize];
            if (power_distance(w, b0) - size.size).abs() > 1e-6 * (1.0 + size.size.abs()) {
                return Err(format!(
                    "{s:?}: witness power {} differs from Size {}",
                    power_distance(w, b0),
                    size.size
                ));
            }
        }
    }
    Ok(())
}

/// Kept simplices are exactly those with Size at most α.
pub fn check_membership_matches_size(c: &Case) -> Result<(), String> {
    let t = tol();
    let k = grid_complex(&c.balls, c.alpha);
    let mut oracle = SizeOracle::new(&c.balls, t).map_err(|e| e.to_string())?;
    for s in all_simplices(c.balls.len() as u32) {
        let size = oracle.size(&s).map_err(|e| e.to_string())?.size;
        // Sizes within slack of α are decided by rounding in either
        // direction; only clear-cut cases are compared.
        if (size - c.alpha).abs() <= 1e-6 {
            continue;
        }
        if k.contains(&s) != (size <= c.alpha) {
            return Err(format!(
                "{s:?}: Size {size}, α {}, kept {}",
                c.alpha,
                k.contains(&s)
            ));
        }
    }
    Ok(())
}

pub fn check_kept_tets_exhaustively(c: &Case) -> Result<(), String> {
    let t = tol();
    let k = grid_complex(&c.balls, c.alpha);
    for s in k.tets() {
        let o = ortho_of_key(s, &c.balls, &t).map_err(|e| e.to_string())?;
        let b0 = &c.balls[s.vertices()[0] as usize];
        let pi0 = power_distance(o.center, b0);
        for b in c.balls.iter().filter(|b| !s.contains(b.index)) {
            if pi0 > power_distance(o.center, b) + t.eps_abs {
                return Err(format!(
                    "kept {s:?} has ball {} inside its ortho-sphere",
                    b.index
                ));
            }
        }
    }
    Ok(())
}

/// At the ortho-center of any potential simplex, the witness test over the
/// 27 surrounding cells agrees with the test over every ball.
pub fn check_neighborhood_witness(c: &Case) -> Result<(), String> {
    let t = tol();
    let cfg = PipelineConfig::new(c.alpha);
    // Same fallback cell size as the pipeline when r_max² + α is not positive.
    let r_max = c.balls.iter().map(|b| b.radius).fold(0.0, f64::max);
    let grid_alpha = if r_max * r_max + c.alpha > 0.0 {
        c.alpha
    } else {
        1.0 - r_max * r_max
    };
    let grid = build_grid(&c.balls, grid_alpha).map_err(|e| e.to_string())?;
    let pots = compute_potentials(&grid, &c.balls, &cfg).map_err(|e| e.to_string())?;
    let vertices = c
        .balls
        .iter()
        .filter(|b| t.le(-b.weight(), c.alpha))
        .map(|b| {
            let key = SimplexKey::vertex(b.index);
            (key, ortho_of_key(&key, &c.balls, &t).unwrap())
        });
    let all = vertices
        .chain(pots.edges.iter().copied())
        .chain(pots.triangles.iter().copied())
        .chain(pots.tets.iter().copied());
    for (s, o) in all {
        let near = grid
            .neighborhood(grid.cell_of(o.center), 1)
            .map(|i| &c.balls[i as usize]);
        let local = ac2_satisfied(&s, o.center, near, &c.balls, &t);
        let global = ac2_satisfied(&s, o.center, &c.balls, &c.balls, &t);
        if local != global {
            return Err(format!(
                "{s:?}: neighborhood says {local}, all balls say {global}"
            ));
        }
    }
    Ok(())
}

pub fn check_oracle_equivalence(c: &Case) -> Result<(), String> {
    let grid = grid_complex(&c.balls, c.alpha);
    let naive = naive_alpha_complex(&c.balls, c.alpha, &tol()).map_err(|e| e.to_string())?;
    let diff = grid.symmetric_difference(&naive);
    if diff.iter().all(Vec::is_empty) {
        Ok(())
    } else {
        Err(format!("grid and reference differ: {diff:?}"))
    }
}

/// Equal power distance from the ortho-center to every incident ball.
///
/// Potential simplices (OrthoSize within α) must agree to `10·eps_abs`.
/// Other simplices can be slivers with ortho-centers far away, where the
/// power distances themselves are only representable to a few ulps, so
/// those get that representation error on top.
pub fn check_ortho_residual(c: &Case) -> Result<(), String> {
    let t = tol();
    for s in all_simplices(c.balls.len() as u32)
        .iter()
        .filter(|s| s.dim() > 0)
    {
        let o = ortho_of_key(s, &c.balls, &t).map_err(|e| e.to_string())?;
        let pis: Vec<f64> = s
            .vertices()
            .iter()
            .map(|&v| power_distance(o.center, &c.balls[v as usize]))
            .collect();
        let hi = pis.iter().cloned().fold(f64::MIN, f64::max);
        let lo = pis.iter().cloned().fold(f64::MAX, f64::min);
        let spread = hi - lo;
        let bound = if t.le(o.ortho_size, c.alpha) {
            10.0 * t.eps_abs
        } else {
            10.0 * t.eps_abs + 64.0 * f64::EPSILON * hi.abs().max(lo.abs())
        };
        if spread > bound {
            return Err(format!(
                "{s:?}: power distances spread by {spread} (bound {bound})"
            ));
        }
    }
    Ok(())
}
