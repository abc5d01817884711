//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("horocyclic parameter must be finite for this operation")]
    InfiniteParameter,
    #[error("point |z| = {0} is outside the interior cutoff")]
    NotInterior(f64),
    #[error("weight exponent gamma = {0} must satisfy gamma > -1")]
    InvalidGamma(f64),
    #[error("negative polynomial degree {0}")]
    NegativeDegree(i64),
    #[error("index (n={n}, k={k}) outside the band 0 <= k <= n")]
    IndexOutOfBand { n: usize, k: i64 },
    #[error("grid has {n_beta} beta nodes, need at least {required} for band {band}")]
    Aliasing { n_beta: usize, required: usize, band: usize },
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("finite-difference stencil leaves the domain at {0}")]
    StencilOutsideDomain(f64),
    #[error("test function support reaches x < {0}")]
    SupportViolation(f64),
    #[error("field lives on the {found:?} disk, operator expects the {expected:?} disk")]
    ModelMismatch { expected: crate::transforms::DiskModel, found: crate::transforms::DiskModel },
    #[error("invalid quadrature specification: {0}")]
    InvalidQuadSpec(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Rejects weights outside the admissible range `gamma > -1`.
pub fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > -1.0 {
        Ok(())
    } else {
        Err(Error::InvalidGamma(gamma))
    }
}
