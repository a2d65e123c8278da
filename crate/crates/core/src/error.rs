use thiserror::Error;

use crate::geometry::SimplexKey;

/// Errors raised while building alpha complexes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlphaError {
    #[error("input contains no balls")]
    EmptyInput,
    #[error("ball {index} has a non-finite coordinate or radius")]
    NonFiniteCoordinate { index: u32 },
    #[error("ball {index} has a negative radius")]
    NegativeRadius { index: u32 },
    #[error("ball at position {position} carries index {index}; indices must equal positions")]
    IndexMismatch { position: usize, index: u32 },
    #[error("duplicate center: balls {first} and {second} share the same center")]
    DuplicateCenter { first: u32, second: u32 },
    #[error("degenerate simplex {0:?}: centers are not affinely independent")]
    DegenerateSimplex(SimplexKey),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
