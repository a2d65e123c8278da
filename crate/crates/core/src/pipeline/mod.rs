//! Two-stage alpha-complex construction: potential simplices bottom-up, then
//! pruning top-down, driven over contiguous chunks of the grid-sorted balls.
//!
//! A simplex belongs to the chunk holding its lowest-ranked vertex in grid
//! order. Each chunk enumerates and prunes only what it owns against the
//! full ball list and grid, so the chunk outputs partition the complex.
//! Accepted simplices whose facets belong to a later chunk are carried
//! forward in a small pending set.

mod complex;
mod potential;
mod prune;

use std::num::NonZeroUsize;
use std::time::{Duration, Instant};

pub use complex::{complex_stats, AlphaComplex, ComplexStats};

use crate::error::AlphaError;
use crate::geometry::{Ball, OrthoResult, SimplexKey, TolerancePolicy};
use crate::grid::{build_grid, Grid};
use crate::oracle;
use potential::Scene;
use prune::Pending;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Grid-accelerated two-stage pipeline.
    Grid,
    /// Exhaustive reference implementation.
    Naive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// α in Å², compared directly against power distances.
    pub alpha: f64,
    pub mode: Mode,
    /// Balls per chunk; `None` processes everything in one pass.
    pub chunk_size: Option<NonZeroUsize>,
    pub workers: NonZeroUsize,
    /// Insert every vertex without its witness test. Valid only when no
    /// ball's power cell is empty.
    pub biomolecule_mode: bool,
    pub tolerance: TolerancePolicy,
}

impl PipelineConfig {
    pub fn new(alpha: f64) -> Self {
        Self {
            alpha,
            mode: Mode::Grid,
            chunk_size: None,
            workers: std::thread::available_parallelism().unwrap_or(NonZeroUsize::MIN),
            biomolecule_mode: false,
            tolerance: TolerancePolicy::default(),
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_chunk_size(mut self, chunk_size: Option<usize>) -> Self {
        self.chunk_size = chunk_size.and_then(NonZeroUsize::new);
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = NonZeroUsize::new(workers).unwrap_or(NonZeroUsize::MIN);
        self
    }

    pub fn with_biomolecule_mode(mut self, on: bool) -> Self {
        self.biomolecule_mode = on;
        self
    }

    pub fn validate(&self) -> Result<(), AlphaError> {
        if !self.alpha.is_finite() {
            return Err(AlphaError::InvalidParameter(format!(
                "alpha must be finite, got {}",
                self.alpha
            )));
        }
        if self.biomolecule_mode && self.alpha < 0.0 {
            return Err(AlphaError::InvalidParameter(format!(
                "biomolecule mode requires alpha >= 0, got {}",
                self.alpha
            )));
        }
        TolerancePolicy::new(self.tolerance.eps_abs, self.tolerance.eps_singular)?;
        Ok(())
    }
}

/// Potential simplices of dimension 1 to 3, each sorted by key with its
/// cached ortho-center.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PotentialSets {
    pub edges: Vec<(SimplexKey, OrthoResult)>,
    pub triangles: Vec<(SimplexKey, OrthoResult)>,
    pub tets: Vec<(SimplexKey, OrthoResult)>,
}

/// Wall time per pipeline stage, accumulated over chunks.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub grid_build: Duration,
    pub potential_edges: Duration,
    pub potential_triangles: Duration,
    pub potential_tets: Duration,
    pub prune_tets: Duration,
    pub prune_triangles: Duration,
    /// Free-edge pruning plus the vertex step.
    pub prune_edges: Duration,
    /// Input parsing and output serialization; filled by callers.
    pub io: Duration,
}

impl StageTimings {
    pub const STAGES: [&'static str; 8] = [
        "grid_build",
        "potential_edges",
        "potential_triangles",
        "potential_tets",
        "prune_tets",
        "prune_triangles",
        "prune_edges",
        "io",
    ];

    pub fn rows(&self) -> [(&'static str, Duration); 8] {
        let v = [
            self.grid_build,
            self.potential_edges,
            self.potential_triangles,
            self.potential_tets,
            self.prune_tets,
            self.prune_triangles,
            self.prune_edges,
            self.io,
        ];
        let mut out = [("", Duration::ZERO); 8];
        for (slot, (name, d)) in out.iter_mut().zip(Self::STAGES.iter().zip(v)) {
            *slot = (name, d);
        }
        out
    }

    pub fn total(&self) -> Duration {
        self.rows().iter().map(|(_, d)| *d).sum()
    }

    pub fn potential(&self) -> Duration {
        self.potential_edges + self.potential_triangles + self.potential_tets
    }

    pub fn pruning(&self) -> Duration {
        self.prune_tets + self.prune_triangles + self.prune_edges
    }
}

/// Checks the ball store: non-empty, index equal to position, finite
/// values, non-negative radii and pairwise distinct centers.
pub fn validate_balls(balls: &[Ball]) -> Result<(), AlphaError> {
    if balls.is_empty() {
        return Err(AlphaError::EmptyInput);
    }
    for (pos, b) in balls.iter().enumerate() {
        if b.index as usize != pos {
            return Err(AlphaError::IndexMismatch {
                position: pos,
                index: b.index,
            });
        }
        if !(b.center.iter().all(|c| c.is_finite()) && b.radius.is_finite()) {
            return Err(AlphaError::NonFiniteCoordinate { index: b.index });
        }
        if b.radius < 0.0 {
            return Err(AlphaError::NegativeRadius { index: b.index });
        }
    }
    // +0.0 folds negative zero into positive zero.
    let mut by_center: Vec<([f64; 3], u32)> = balls
        .iter()
        .map(|b| (b.center.map(|c| c + 0.0), b.index))
        .collect();
    by_center.sort_unstable_by(|x, y| {
        x.0[0]
            .total_cmp(&y.0[0])
            .then(x.0[1].total_cmp(&y.0[1]))
            .then(x.0[2].total_cmp(&y.0[2]))
            .then(x.1.cmp(&y.1))
    });
    if let Some(w) = by_center.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(AlphaError::DuplicateCenter {
            first: w[0].1,
            second: w[1].1,
        });
    }
    Ok(())
}

/// α used to size the grid. When `r_max² + α ≤ 0` no edge can be potential
/// and any positive cell side is correct for the vertex witness test.
fn grid_alpha(balls: &[Ball], alpha: f64) -> f64 {
    let r_max = balls.iter().map(|b| b.radius).fold(0.0f64, f64::max);
    if r_max * r_max + alpha > 0.0 {
        alpha
    } else {
        1.0 - r_max * r_max
    }
}

pub fn potential_edges(
    grid: &Grid,
    balls: &[Ball],
    cfg: &PipelineConfig,
) -> Result<Vec<(SimplexKey, OrthoResult)>, AlphaError> {
    let scene = Scene::new(balls, grid, cfg.alpha, cfg.tolerance);
    let fans = potential::owned_edges(&scene, 0..balls.len())?;
    Ok(potential::flatten_edges(&fans))
}

pub fn potential_triangles(
    edges: &[(SimplexKey, OrthoResult)],
    grid: &Grid,
    balls: &[Ball],
    cfg: &PipelineConfig,
) -> Result<Vec<(SimplexKey, OrthoResult)>, AlphaError> {
    let scene = Scene::new(balls, grid, cfg.alpha, cfg.tolerance);
    let fans = potential::edge_fans_from_list(&scene, edges);
    let tris = potential::owned_triangles(&scene, &fans)?;
    Ok(potential::flatten_triangles(&tris))
}

pub fn potential_tets(
    triangles: &[(SimplexKey, OrthoResult)],
    grid: &Grid,
    balls: &[Ball],
    cfg: &PipelineConfig,
) -> Result<Vec<(SimplexKey, OrthoResult)>, AlphaError> {
    let scene = Scene::new(balls, grid, cfg.alpha, cfg.tolerance);
    let fans = potential::triangle_fans_from_list(&scene, triangles);
    let mut tets = potential::owned_tets(&scene, &fans)?;
    tets.sort_unstable_by_key(|t| t.0);
    Ok(tets)
}

/// All three potential stages over the whole input.
pub fn compute_potentials(
    grid: &Grid,
    balls: &[Ball],
    cfg: &PipelineConfig,
) -> Result<PotentialSets, AlphaError> {
    let edges = potential_edges(grid, balls, cfg)?;
    let triangles = potential_triangles(&edges, grid, balls, cfg)?;
    let tets = potential_tets(&triangles, grid, balls, cfg)?;
    Ok(PotentialSets {
        edges,
        triangles,
        tets,
    })
}

/// Prunes a complete set of potential simplices into the alpha complex.
pub fn prune(
    potentials: &PotentialSets,
    grid: &Grid,
    balls: &[Ball],
    cfg: &PipelineConfig,
) -> Result<AlphaComplex, AlphaError> {
    cfg.validate()?;
    let scene = Scene::new(balls, grid, cfg.alpha, cfg.tolerance);
    let mut pending = Pending::default();
    let mut timings = StageTimings::default();
    let simplices = prune::prune_chunk(
        &scene,
        potentials,
        0..balls.len(),
        cfg.biomolecule_mode,
        &mut pending,
        &mut timings,
    );
    debug_assert!(pending.is_empty());
    Ok(AlphaComplex::from_simplices(
        balls.len(),
        cfg.alpha,
        simplices,
    ))
}

pub fn compute_alpha_complex(
    balls: &[Ball],
    cfg: &PipelineConfig,
) -> Result<AlphaComplex, AlphaError> {
    compute_alpha_complex_profiled(balls, cfg).map(|(k, _)| k)
}

/// [`compute_alpha_complex`] that also reports per-stage wall times.
pub fn compute_alpha_complex_profiled(
    balls: &[Ball],
    cfg: &PipelineConfig,
) -> Result<(AlphaComplex, StageTimings), AlphaError> {
    cfg.validate()?;
    validate_balls(balls)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.get())
        .build()
        .map_err(|e| AlphaError::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cfg.mode {
        Mode::Grid => run_chunked(balls, cfg),
        Mode::Naive => {
            let t = Instant::now();
            let k = oracle::naive_alpha_complex_with(
                balls,
                cfg.alpha,
                &cfg.tolerance,
                cfg.biomolecule_mode,
            )?;
            let timings = StageTimings {
                prune_tets: t.elapsed(),
                ..Default::default()
            };
            Ok((k, timings))
        }
    })
}

fn run_chunked(
    balls: &[Ball],
    cfg: &PipelineConfig,
) -> Result<(AlphaComplex, StageTimings), AlphaError> {
    let mut timings = StageTimings::default();
    let t = Instant::now();
    let grid = build_grid(balls, grid_alpha(balls, cfg.alpha))?;
    let scene = Scene::new(balls, &grid, cfg.alpha, cfg.tolerance);
    timings.grid_build = t.elapsed();

    let n = balls.len();
    let chunk = cfg.chunk_size.map_or(n, NonZeroUsize::get);
    let mut pending = Pending::default();
    let mut simplices = Vec::new();
    for start in (0..n).step_by(chunk) {
        let owned = start..(start + chunk).min(n);

        let t = Instant::now();
        let edge_fans = potential::owned_edges(&scene, owned.clone())?;
        timings.potential_edges += t.elapsed();

        let t = Instant::now();
        let tri_fans = potential::owned_triangles(&scene, &edge_fans)?;
        timings.potential_triangles += t.elapsed();

        let t = Instant::now();
        let mut tets = potential::owned_tets(&scene, &tri_fans)?;
        tets.sort_unstable_by_key(|t| t.0);
        timings.potential_tets += t.elapsed();

        let t = Instant::now();
        let pots = PotentialSets {
            edges: potential::flatten_edges(&edge_fans),
            triangles: potential::flatten_triangles(&tri_fans),
            tets,
        };
        drop(edge_fans);
        drop(tri_fans);
        timings.potential_edges += t.elapsed();

        simplices.extend(prune::prune_chunk(
            &scene,
            &pots,
            owned,
            cfg.biomolecule_mode,
            &mut pending,
            &mut timings,
        ));
    }
    debug_assert!(pending.is_empty());
    Ok((
        AlphaComplex::from_simplices(n, cfg.alpha, simplices),
        timings,
    ))
}
