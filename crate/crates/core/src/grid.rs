//! Tensor-product sample grids on data space and on the disk.
//!
//! A [`DataGrid`] samples a function of `(β, a)` at uniform `β` and at
//! `a = x/√(1−x²)`, where `x = sin α` runs over the Gauss–Jacobi nodes of
//! the weight `(1−x²)^{γ+1/2}`. Its inner product discretizes
//! `L²(G, μ_h^{−2γ} dβ da)`.
//!
//! A [`DiskGrid`] samples a function on the Poincaré disk at the preimages
//! under `Φ` of Euclidean polar nodes: uniform angle and Gauss–Jacobi
//! nodes in `y = 2ρ²−1` for the weight `(1−y)^γ`. Its inner product
//! discretizes `L²(D_H, x^{2γ+3} dV_H) = Φ* L²(D_E, d^γ dV_E)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_gamma, Error, Result};
use crate::geometry::{phi_inv, DiskPoint, GeodesicHoro};
use crate::quadrature::gauss_jacobi_cached;

/// Measure tag carried by data grids.
pub const DATA_CONVENTION: &str = "mu_h^(-2gamma) dbeta da";
/// Measure tag carried by disk grids.
pub const DISK_CONVENTION: &str = "x^(2gamma+3) dV_H";

/// Node layout of a [`DataGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataLayout {
    pub gamma: f64,
    pub n_beta: usize,
    pub n_alpha: usize,
}

impl DataLayout {
    /// Smallest number of `β` nodes accepted for band `n`.
    pub fn min_n_beta(n: usize) -> usize {
        4 * (n + 1)
    }

    /// Default layout for band `n`: wide enough in `β` to resolve the
    /// out-of-band indices `|k| ≤ n + 8` without aliasing.
    pub fn for_band(gamma: f64, n: usize) -> Self {
        Self { gamma, n_beta: 4 * (n + 9), n_alpha: n + 2 }
    }

    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)?;
        if self.n_beta < 4 || self.n_alpha < 1 {
            return Err(Error::Shape(format!("degenerate data layout {}x{}", self.n_beta, self.n_alpha)));
        }
        Ok(())
    }

    pub fn beta(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n_beta as f64
    }

    /// Nodes `x_i = sin α_i` and weights for `(1−x²)^{γ+1/2}`.
    pub fn x_rule(&self) -> Result<std::sync::Arc<crate::quadrature::Rule>> {
        gauss_jacobi_cached(self.n_alpha, self.gamma + 0.5, self.gamma + 0.5)
    }
}

/// Samples of a function on data space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataGrid {
    pub layout: DataLayout,
    pub x_nodes: Vec<f64>,
    pub x_weights: Vec<f64>,
    /// Row-major in `β`: sample `(j, i)` sits at `j * n_alpha + i`.
    pub samples: Vec<Complex64>,
    pub convention: String,
}

impl DataGrid {
    pub fn zeros(layout: DataLayout) -> Result<Self> {
        layout.validate()?;
        let rule = layout.x_rule()?;
        Ok(Self {
            layout,
            x_nodes: rule.nodes.clone(),
            x_weights: rule.weights.clone(),
            samples: vec![Complex64::new(0.0, 0.0); layout.n_beta * layout.n_alpha],
            convention: DATA_CONVENTION.to_string(),
        })
    }

    /// Samples `u` at every node.
    pub fn from_fn<F: Fn(GeodesicHoro) -> Complex64 + Sync>(layout: DataLayout, u: F) -> Result<Self> {
        use rayon::prelude::*;
        let mut grid = Self::zeros(layout)?;
        let na = layout.n_alpha;
        let nodes: Vec<GeodesicHoro> = (0..grid.samples.len()).map(|p| grid.node(p / na, p % na)).collect();
        grid.samples = nodes.par_iter().map(|&g| u(g)).collect();
        Ok(grid)
    }

    pub fn alpha(&self, i: usize) -> f64 {
        self.x_nodes[i].asin()
    }

    pub fn a(&self, i: usize) -> f64 {
        let x = self.x_nodes[i];
        x / (1.0 - x * x).sqrt()
    }

    pub fn node(&self, j: usize, i: usize) -> GeodesicHoro {
        GeodesicHoro::new(self.layout.beta(j), self.a(i))
    }

    pub fn get(&self, j: usize, i: usize) -> Complex64 {
        self.samples[j * self.layout.n_alpha + i]
    }

    /// Quadrature weight of node `(·, i)` for `μ_h^{−2γ} dβ da`.
    pub fn weight(&self, i: usize) -> f64 {
        let x = self.x_nodes[i];
        self.x_weights[i] * (1.0 - x * x).powf(-2.0 * self.layout.gamma - 2.0) * TAU / self.layout.n_beta as f64
    }

    pub fn inner(&self, other: &DataGrid) -> Result<Complex64> {
        self.check_same(other)?;
        let na = self.layout.n_alpha;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .enumerate()
            .map(|(p, (u, v))| u * v.conj() * self.weight(p % na))
            .sum())
    }

    pub fn norm(&self) -> f64 {
        let na = self.layout.n_alpha;
        self.samples.iter().enumerate().map(|(p, u)| u.norm_sqr() * self.weight(p % na)).sum::<f64>().sqrt()
    }

    pub fn check_same(&self, other: &DataGrid) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::Shape(format!("data layouts differ: {:?} vs {:?}", self.layout, other.layout)));
        }
        Ok(())
    }

    pub fn sub(&self, other: &DataGrid) -> Result<DataGrid> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.samples.iter_mut().zip(&other.samples).for_each(|(a, b)| *a -= b);
        Ok(out)
    }
}

/// Node layout of a [`DiskGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskLayout {
    pub gamma: f64,
    pub n_angle: usize,
    pub n_radial: usize,
}

impl DiskLayout {
    /// Layout integrating products of band-`n` Zernike functions exactly.
    pub fn for_band(gamma: f64, n: usize) -> Self {
        Self { gamma, n_angle: 2 * n + 4, n_radial: n / 2 + 2 }
    }

    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)?;
        if self.n_angle < 1 || self.n_radial < 1 {
            return Err(Error::Shape(format!("degenerate disk layout {}x{}", self.n_angle, self.n_radial)));
        }
        Ok(())
    }

    pub fn angle(&self, i: usize) -> f64 {
        TAU * i as f64 / self.n_angle as f64
    }
}

/// Samples of a function on the Poincaré disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskGrid {
    pub layout: DiskLayout,
    pub y_nodes: Vec<f64>,
    pub y_weights: Vec<f64>,
    /// Row-major in angle: sample `(i, j)` sits at `i * n_radial + j`.
    pub samples: Vec<Complex64>,
    pub convention: String,
}

impl DiskGrid {
    pub fn zeros(layout: DiskLayout) -> Result<Self> {
        layout.validate()?;
        let rule = gauss_jacobi_cached(layout.n_radial, layout.gamma, 0.0)?;
        Ok(Self {
            layout,
            y_nodes: rule.nodes.clone(),
            y_weights: rule.weights.clone(),
            samples: vec![Complex64::new(0.0, 0.0); layout.n_angle * layout.n_radial],
            convention: DISK_CONVENTION.to_string(),
        })
    }

    /// Samples `f` (a function on the Poincaré disk) at every node.
    pub fn from_fn<F: Fn(DiskPoint) -> Complex64 + Sync>(layout: DiskLayout, f: F) -> Result<Self> {
        use rayon::prelude::*;
        let mut grid = Self::zeros(layout)?;
        let nr = layout.n_radial;
        let pts: Vec<DiskPoint> = (0..grid.samples.len()).map(|p| grid.node_hyper(p / nr, p % nr)).collect();
        grid.samples = pts.par_iter().map(|&z| f(z)).collect();
        Ok(grid)
    }

    pub fn rho(&self, j: usize) -> f64 {
        ((1.0 + self.y_nodes[j]) / 2.0).sqrt()
    }

    /// Node on the Euclidean disk.
    pub fn node_euclid(&self, i: usize, j: usize) -> DiskPoint {
        DiskPoint::from_polar(self.rho(j), self.layout.angle(i))
    }

    /// Node on the Poincaré disk, `Φ^{−1}` of the Euclidean node.
    pub fn node_hyper(&self, i: usize, j: usize) -> DiskPoint {
        phi_inv(self.node_euclid(i, j))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.samples[i * self.layout.n_radial + j]
    }

    pub fn weight(&self, j: usize) -> f64 {
        self.y_weights[j] * 2f64.powf(-self.layout.gamma) / 4.0 * TAU / self.layout.n_angle as f64
    }

    pub fn inner(&self, other: &DiskGrid) -> Result<Complex64> {
        self.check_same(other)?;
        let nr = self.layout.n_radial;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .enumerate()
            .map(|(p, (u, v))| u * v.conj() * self.weight(p % nr))
            .sum())
    }

    pub fn norm(&self) -> f64 {
        let nr = self.layout.n_radial;
        self.samples.iter().enumerate().map(|(p, u)| u.norm_sqr() * self.weight(p % nr)).sum::<f64>().sqrt()
    }

    pub fn check_same(&self, other: &DiskGrid) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::Shape(format!("disk layouts differ: {:?} vs {:?}", self.layout, other.layout)));
        }
        Ok(())
    }

    pub fn sub(&self, other: &DiskGrid) -> Result<DiskGrid> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.samples.iter_mut().zip(&other.samples).for_each(|(a, b)| *a -= b);
        Ok(out)
    }
}
