//! X-ray transform on the Poincaré disk with weights `x^{2+2γ}`: forward and
//! backprojection, the singular value decomposition and SVD inversion, the
//! wedge operators and normal operator, and range characterization through
//! moment conditions and boundary operators.
//!
//! The library is organised bottom-up: [`geometry`] and [`quadrature`] supply
//! coordinates and integration rules, [`specfun`] the singular bases,
//! [`transforms`] the operators themselves, [`spectral`] coefficient-space
//! tools, [`range`] the range tests and [`verify`] the acceptance matrix.

pub mod error;
pub mod geometry;
pub mod grid;
pub mod quadrature;
pub mod range;
pub mod specfun;
pub mod spectral;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{
    BoundaryPointGamma, DiskPoint, ExtReal, FanBeamCoord, GeodesicHoro, GeodesicVertex, Sheet, UnitTangent,
};
pub use grid::{DataGrid, DataLayout, DiskGrid, DiskLayout};
pub use quadrature::Estimate;
pub use range::{DataFn, HilbertMode, MomentFamily, MomentReport, RangeReport, RangeSpec};
pub use specfun::{BasisIndex, ZernikeBasis, ZeroBasis};
pub use spectral::{CoeffTable, InterpMode, Reconstruction, SpectralFilter};
pub use transforms::{DiskModel, QuadSpec, ScalarField, SmoothnessClass};
pub use verify::{CheckId, CheckReport, SuiteConfig, Tolerances};

/// Re-exported so downstream crates share the same complex type.
pub use num_complex::Complex64;
