//! Alpha complexes of weighted points in R³, computed directly from
//! ortho-centers and witness tests without building the weighted Delaunay
//! triangulation first.
//!
//! The [`pipeline`] module holds the grid-accelerated, chunked, data-parallel
//! construction; [`oracle`] holds an exhaustive reference used to validate it.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod oracle;
pub mod pipeline;
pub mod random;

pub use error::AlphaError;
pub use geometry::{Ball, OrthoResult, SimplexKey, TolerancePolicy};
pub use pipeline::{compute_alpha_complex, AlphaComplex, Mode, PipelineConfig};
