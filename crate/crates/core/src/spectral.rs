//! Analysis and synthesis in the singular bases, SVD inversion, the wedge
//! operators `L_γ^H` and `T_γ^H`, the normal operator and Sobolev norms.
//!
//! Data-side coefficients are taken against `ψₙₖ^{γ,H}` in
//! `L²(G, μ_h^{−2γ} dβ da)`, disk-side coefficients against `Φ̂*Zₙₖ^γ` in
//! `L²(D_H, x^{2γ+3} dV_H)`. For `f = Σ fₙₖ Φ̂*Zₙₖ^γ` the forward data is
//! `Σ σₙₖ fₙₖ ψₙₖ^{γ,H}`.

use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::ops::RangeInclusive;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_gamma, Error, Result};
use crate::geometry::{bdf_x, footprint, DiskPoint, GeodesicHoro, UnitTangent};
pub use crate::grid::{DataGrid, DataLayout, DiskGrid, DiskLayout};
use crate::quadrature::{periodic_trapezoid, Estimate};
use crate::specfun::{fd5, sigma_nk, BasisIndex, JacobiFamily, ZernikeBasis};
use crate::transforms::{backproject_hyper, forward_grid, xray_hyper, DiskModel, QuadSpec, ScalarField};

/// Which side of the transform a coefficient table describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    Disk,
    Data,
}

/// Banded table of coefficients `uₙₖ`, `0 ≤ n ≤ n_max`.
///
/// Disk tables hold `0 ≤ k ≤ n`. Data tables hold `n − k_max ≤ k ≤ k_max`,
/// a window symmetric under `k ↦ n − k` that includes the kernel indices
/// `k < 0` and `k > n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffTable {
    pub gamma: f64,
    pub space: Space,
    pub n_max: usize,
    pub k_max: i64,
    offsets: Vec<usize>,
    entries: Vec<Complex64>,
}

impl CoeffTable {
    fn with_window(gamma: f64, space: Space, n_max: usize, k_max: i64) -> Result<Self> {
        check_gamma(gamma)?;
        let mut t = Self { gamma, space, n_max, k_max, offsets: Vec::with_capacity(n_max + 2), entries: Vec::new() };
        let mut off = 0;
        for n in 0..=n_max {
            t.offsets.push(off);
            off += t.k_range(n).count();
        }
        t.offsets.push(off);
        t.entries = vec![Complex64::new(0.0, 0.0); off];
        Ok(t)
    }

    pub fn new_disk(gamma: f64, n_max: usize) -> Result<Self> {
        Self::with_window(gamma, Space::Disk, n_max, n_max as i64)
    }

    /// Data table; `k_max` must be at least `n_max`.
    pub fn new_data(gamma: f64, n_max: usize, k_max: i64) -> Result<Self> {
        if k_max < n_max as i64 {
            return Err(Error::Shape(format!("k_max = {k_max} is below n_max = {n_max}")));
        }
        Self::with_window(gamma, Space::Data, n_max, k_max)
    }

    /// Default data window `k_max = n_max + 8`.
    pub fn default_k_max(n_max: usize) -> i64 {
        n_max as i64 + 8
    }

    pub fn k_range(&self, n: usize) -> RangeInclusive<i64> {
        match self.space {
            Space::Disk => 0..=n as i64,
            Space::Data => n as i64 - self.k_max..=self.k_max,
        }
    }

    fn slot(&self, n: usize, k: i64) -> Option<usize> {
        if n > self.n_max || !self.k_range(n).contains(&k) {
            return None;
        }
        Some(self.offsets[n] + (k - self.k_range(n).start()) as usize)
    }

    /// Entry `(n, k)`, zero outside the window.
    pub fn get(&self, n: usize, k: i64) -> Complex64 {
        self.slot(n, k).map_or(Complex64::new(0.0, 0.0), |s| self.entries[s])
    }

    pub fn set(&mut self, n: usize, k: i64, v: Complex64) -> Result<()> {
        let s = self.slot(n, k).ok_or(Error::IndexOutOfBand { n, k })?;
        self.entries[s] = v;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (BasisIndex, Complex64)> + '_ {
        (0..=self.n_max).flat_map(move |n| self.k_range(n).map(move |k| (BasisIndex::new(n, k), self.get(n, k))))
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Entries with `k ∉ [0, n]` whose magnitude exceeds `tol`, largest first.
    pub fn out_of_band(&self, tol: f64) -> Vec<(BasisIndex, f64)> {
        let mut v: Vec<_> =
            self.iter().filter(|(i, c)| !i.in_band() && c.norm() > tol).map(|(i, c)| (i, c.norm())).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1));
        v
    }

    pub fn out_of_band_norm(&self) -> f64 {
        self.iter().filter(|(i, _)| !i.in_band()).map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn in_band_max(&self) -> f64 {
        self.iter().filter(|(i, _)| i.in_band()).map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }

    /// Entrywise difference over the union of both windows, in the larger table's shape.
    pub fn sub(&self, other: &CoeffTable) -> CoeffTable {
        let mut out = if self.len() >= other.len() { self.clone() } else { other.clone() };
        let idx: Vec<BasisIndex> = out.iter().map(|(i, _)| i).collect();
        for i in idx {
            out.set(i.n, i.k, self.get(i.n, i.k) - other.get(i.n, i.k)).expect("index from own window");
        }
        out
    }
}

/// `(Σ (n+1+γ)^{2s} |uₙₖ|²)^{1/2}`.
pub fn sobolev_norm(c: &CoeffTable, s: f64) -> f64 {
    c.iter().map(|(i, v)| (i.n as f64 + 1.0 + c.gamma).powf(2.0 * s) * v.norm_sqr()).sum::<f64>().sqrt()
}

fn require_data_band(layout: &DataLayout, n_max: usize) -> Result<()> {
    if layout.n_beta < DataLayout::min_n_beta(n_max) {
        return Err(Error::Aliasing { n_beta: layout.n_beta, required: DataLayout::min_n_beta(n_max), band: n_max });
    }
    if layout.n_alpha < n_max + 1 {
        return Err(Error::GridTooCoarse(format!("{} alpha nodes cannot resolve band {n_max}", layout.n_alpha)));
    }
    Ok(())
}

/// Largest data window the `β` sampling separates from a band-`n_max` signal.
fn resolved_k_max(n_beta: usize, n_max: usize, requested: i64) -> i64 {
    let cap = (n_beta as i64 - 1 - n_max as i64) / 2;
    requested.min(cap).max(n_max as i64)
}

/// Coefficients of `u` against `ψₙₖ^{γ,H}` for `n ≤ n_max` and the default
/// window `k_max = n_max + 8`, narrowed to what the `β` sampling resolves.
pub fn analyze_data(u: &DataGrid, n_max: usize) -> Result<CoeffTable> {
    analyze_data_window(u, n_max, CoeffTable::default_k_max(n_max))
}

pub fn analyze_data_window(u: &DataGrid, n_max: usize, k_max: i64) -> Result<CoeffTable> {
    let lay = u.layout;
    require_data_band(&lay, n_max)?;
    let gamma = lay.gamma;
    let k_max = resolved_k_max(lay.n_beta, n_max, k_max);
    let mut table = CoeffTable::new_data(gamma, n_max, k_max)?;
    let l_max = 2 * k_max;
    let fam = JacobiFamily::new(gamma, n_max)?;
    let nb = lay.n_beta;
    // S[i][l + l_max] = Σ_j v(j, i) e^{−ilβ_j} with v the reduced samples.
    let spectra: Vec<(Vec<Complex64>, Vec<f64>)> = (0..lay.n_alpha)
        .into_par_iter()
        .map(|i| {
            let x = u.x_nodes[i];
            let red = (1.0 - x * x).powf(-(gamma + 1.0));
            let row: Vec<Complex64> = (0..nb).map(|j| u.get(j, i) * red).collect();
            let alpha = x.asin();
            let s = (-l_max..=l_max)
                .map(|l| {
                    let sum: Complex64 = row
                        .iter()
                        .enumerate()
                        .map(|(j, v)| v * Complex64::from_polar(1.0, -(l as f64) * lay.beta(j)))
                        .sum();
                    sum * Complex64::from_polar(u.x_weights[i], -(l as f64) * (alpha + FRAC_PI_2))
                })
                .collect();
            (s, fam.eval_all(x))
        })
        .collect();
    let scale = TAU / nb as f64;
    for n in 0..=n_max {
        for k in table.k_range(n) {
            let l = n as i64 - 2 * k;
            let v: Complex64 = spectra.iter().map(|(s, p)| s[(l + l_max) as usize] * p[n]).sum();
            table.set(n, k, v * scale)?;
        }
    }
    Ok(table)
}

/// `Σ cₙₖ ψₙₖ^{γ,H}` sampled on a data grid.
pub fn synthesize_data(c: &CoeffTable, layout: DataLayout) -> Result<DataGrid> {
    if (c.gamma - layout.gamma).abs() > 0.0 {
        return Err(Error::Shape(format!("table gamma {} vs grid gamma {}", c.gamma, layout.gamma)));
    }
    let mut grid = DataGrid::zeros(layout)?;
    let fam = JacobiFamily::new(c.gamma, c.n_max)?;
    let entries: Vec<(BasisIndex, Complex64)> = c.iter().filter(|(_, v)| *v != Complex64::new(0.0, 0.0)).collect();
    let cols: Vec<Vec<Complex64>> = (0..layout.n_alpha)
        .into_par_iter()
        .map(|i| {
            let x = grid.x_nodes[i];
            let alpha = x.asin();
            let p = fam.eval_all(x);
            let amp = (1.0 - x * x).powf(c.gamma + 1.0);
            (0..layout.n_beta)
                .map(|j| {
                    let beta = layout.beta(j);
                    entries
                        .iter()
                        .map(|(idx, v)| {
                            v * Complex64::from_polar(amp * p[idx.n], idx.l() as f64 * (beta + alpha + FRAC_PI_2))
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    for (i, col) in cols.iter().enumerate() {
        for (j, v) in col.iter().enumerate() {
            grid.samples[j * layout.n_alpha + i] = *v;
        }
    }
    Ok(grid)
}

fn require_disk_band(layout: &DiskLayout, n_max: usize) -> Result<()> {
    if layout.n_angle < 2 * n_max + 1 || 2 * layout.n_radial < n_max + 1 {
        return Err(Error::GridTooCoarse(format!(
            "disk grid {}x{} cannot resolve band {n_max}",
            layout.n_angle, layout.n_radial
        )));
    }
    Ok(())
}

/// Coefficients of `f` against `Φ̂*Zₙₖ^γ`, `n ≤ n_max`.
pub fn analyze_disk(f: &DiskGrid, n_max: usize) -> Result<CoeffTable> {
    let lay = f.layout;
    require_disk_band(&lay, n_max)?;
    let basis = ZernikeBasis::new(lay.gamma, n_max)?;
    let mut table = CoeffTable::new_disk(lay.gamma, n_max)?;
    let l_max = n_max as i64;
    // F[j][l] = Σ_i f(i, j) e^{−ilω_i}
    let spectra: Vec<Vec<Complex64>> = (0..lay.n_radial)
        .map(|j| {
            (-l_max..=l_max)
                .map(|l| {
                    (0..lay.n_angle).map(|i| f.get(i, j) * Complex64::from_polar(1.0, -(l as f64) * lay.angle(i))).sum()
                })
                .collect()
        })
        .collect();
    for n in 0..=n_max {
        for k in 0..=n {
            let l = n as i64 - 2 * k as i64;
            let v: Complex64 = (0..lay.n_radial)
                .map(|j| {
                    let radial = basis.eval_normalized(n, k, DiskPoint::new(f.rho(j), 0.0));
                    spectra[j][(l + l_max) as usize] * radial.conj() * f.weight(j)
                })
                .sum();
            table.set(n, k as i64, v)?;
        }
    }
    Ok(table)
}

/// `Σ cₙₖ Φ̂*Zₙₖ^γ` sampled on a disk grid. Only in-band entries are used.
pub fn synthesize_disk(c: &CoeffTable, layout: DiskLayout) -> Result<DiskGrid> {
    if (c.gamma - layout.gamma).abs() > 0.0 {
        return Err(Error::Shape(format!("table gamma {} vs grid gamma {}", c.gamma, layout.gamma)));
    }
    let basis = ZernikeBasis::new(c.gamma, c.n_max)?;
    let entries: Vec<(BasisIndex, Complex64)> =
        c.iter().filter(|(i, v)| i.in_band() && *v != Complex64::new(0.0, 0.0)).collect();
    let mut grid = DiskGrid::zeros(layout)?;
    let nr = layout.n_radial;
    let pts: Vec<DiskPoint> = (0..grid.samples.len()).map(|p| grid.node_euclid(p / nr, p % nr)).collect();
    grid.samples = pts
        .par_iter()
        .map(|&w| entries.iter().map(|(i, v)| v * basis.eval_normalized(i.n, i.k as usize, w)).sum())
        .collect();
    Ok(grid)
}

/// The field `Σ cₙₖ Φ̂*Zₙₖ^γ` on the Poincaré disk.
pub fn disk_field(c: &CoeffTable) -> Result<ScalarField> {
    let basis = Arc::new(ZernikeBasis::new(c.gamma, c.n_max)?);
    let entries: Vec<(BasisIndex, Complex64)> =
        c.iter().filter(|(i, v)| i.in_band() && *v != Complex64::new(0.0, 0.0)).collect();
    Ok(ScalarField::new(DiskModel::Poincare, crate::transforms::SmoothnessClass::Even, move |z| {
        let w = crate::geometry::phi_map(z);
        entries.iter().map(|(i, v)| v * basis.eval_normalized(i.n, i.k as usize, w)).sum()
    }))
}

/// Spectral multiplier applied when inverting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpectralFilter {
    /// `1/σ` on the band, zero beyond it.
    Truncate,
    /// `σ/(σ² + λ²)`.
    Tikhonov(f64),
}

impl SpectralFilter {
    pub fn inverse(&self, sigma: f64) -> f64 {
        match *self {
            SpectralFilter::Truncate => 1.0 / sigma,
            SpectralFilter::Tikhonov(lam) => sigma / (sigma * sigma + lam * lam),
        }
    }
}

/// Output of [`svd_reconstruct`].
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub data_coeffs: CoeffTable,
    pub coeffs: CoeffTable,
    pub grid: DiskGrid,
    /// `(Σ_{k∉[0,n]} |uₙₖ|²)^{1/2}`, the part of the data outside the range.
    pub out_of_range_norm: f64,
}

impl Reconstruction {
    pub fn out_of_range(&self, tol: f64) -> Vec<(BasisIndex, f64)> {
        self.data_coeffs.out_of_band(tol)
    }
}

/// Inverts `I₀^H x^{2+2γ}` on the band `n ≤ n_max`: `fₙₖ = uₙₖ/σₙₖ^γ`
/// (or the filtered multiplier). Kernel components are reported, not inverted.
pub fn svd_reconstruct(
    u: &DataGrid,
    n_max: usize,
    filter: SpectralFilter,
    disk: Option<DiskLayout>,
) -> Result<Reconstruction> {
    let gamma = u.layout.gamma;
    let data_coeffs = analyze_data(u, n_max)?;
    let mut coeffs = CoeffTable::new_disk(gamma, n_max)?;
    for n in 0..=n_max {
        for k in 0..=n as i64 {
            let sigma = sigma_nk(BasisIndex::new(n, k), gamma)?;
            coeffs.set(n, k, data_coeffs.get(n, k) * filter.inverse(sigma))?;
        }
    }
    let layout = disk.unwrap_or_else(|| DiskLayout::for_band(gamma, n_max));
    let grid = synthesize_disk(&coeffs, layout)?;
    let out_of_range_norm = data_coeffs.out_of_band_norm();
    Ok(Reconstruction { data_coeffs, coeffs, grid, out_of_range_norm })
}

/// Finite-difference configuration for the wedge operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdSpec {
    pub base_step: f64,
}

impl Default for FdSpec {
    fn default() -> Self {
        Self { base_step: 1e-3 }
    }
}

impl FdSpec {
    /// Step in `x`, shrunk near `x = 0` and `x = 1`.
    pub fn step_x(&self, x: f64) -> f64 {
        self.base_step * 1f64.min(10.0 * x).min(10.0 * (1.0 - x))
    }
}

/// Point of the Poincaré disk with boundary defining function `x` and polar angle `ω`.
fn point_from_x(x: f64, omega: f64) -> DiskPoint {
    DiskPoint::from_polar(((1.0 - x) / (1.0 + x)).max(0.0).sqrt(), omega)
}

/// `L_γ^H f(z)` by 5-point differences in `(x, ω)`:
/// `−(1−x²)∂ₓ² − ((2γ+1)/x − (2γ+3)x)∂ₓ − (1−x²)^{−1}∂_ω² + (1+γ)²`.
pub fn apply_l_gamma_h(f: &ScalarField, gamma: f64, z: DiskPoint, fd: &FdSpec) -> Result<Complex64> {
    f.require(DiskModel::Poincare)?;
    check_gamma(gamma)?;
    let z = z.require_interior()?;
    let x = bdf_x(z);
    let omega = z.omega();
    let h = fd.step_x(x);
    if !(x - 2.0 * h > 0.0 && x + 2.0 * h < 1.0) {
        return Err(Error::StencilOutsideDomain(x));
    }
    let g = |x: f64, o: f64| f.eval(point_from_x(x, o));
    let (d1, d2) = fd5(|s| g(s, omega), x, h);
    let (_, d2w) = fd5(|o| g(x, o), omega, fd.base_step);
    let x2 = x * x;
    Ok(-(1.0 - x2) * d2 - ((2.0 * gamma + 1.0) / x - (2.0 * gamma + 3.0) * x) * d1 - d2w / (1.0 - x2)
        + g(x, omega) * (1.0 + gamma).powi(2))
}

/// `T_γ^H u(β, a) = (−T² + 2(γ+1)aT + γ² − 2(γ+1)a² − 1) u` with
/// `T = ∂_β − (1+a²)∂_a`, differentiated along its flow `(β+s, tan(atan a − s))`.
pub fn apply_t_gamma_h<U>(u: U, gamma: f64, g: GeodesicHoro, fd: &FdSpec) -> Result<Complex64>
where
    U: Fn(GeodesicHoro) -> Complex64,
{
    check_gamma(gamma)?;
    let a = g.a_finite()?;
    let alpha = a.atan();
    let h = fd.base_step * 1f64.min(10.0 * (FRAC_PI_2 - alpha.abs()));
    if alpha.abs() + 2.0 * h >= FRAC_PI_2 {
        return Err(Error::StencilOutsideDomain(a));
    }
    let flow = |s: f64| u(GeodesicHoro::new(g.beta + s, (alpha - s).tan()));
    let (d1, d2) = fd5(flow, 0.0, h);
    let c = gamma * gamma - 2.0 * (gamma + 1.0) * a * a - 1.0;
    Ok(-d2 + 2.0 * (gamma + 1.0) * a * d1 + flow(0.0) * c)
}

/// `(I₀^H x^{2+2γ})* I₀^H x^{2+2γ} f(z) = x^{−1} ∫ μ_h^{−2γ} I₀^H(x^{2+2γ}f)(π_h(z,θ)) dθ`.
/// The error field is the fiber rule estimate plus the largest line-integral estimate.
pub fn normal_operator_at(f: &ScalarField, gamma: f64, z: DiskPoint, q: &QuadSpec) -> Result<Estimate> {
    f.require(DiskModel::Poincare)?;
    check_gamma(gamma)?;
    let z = z.require_interior()?;
    let worst = Cell::new(0.0f64);
    let failed = Cell::new(None);
    let est = periodic_trapezoid(
        |theta| {
            let g = match footprint(UnitTangent { z, theta }) {
                Ok(g) => g,
                Err(e) => {
                    failed.set(Some(e));
                    return Complex64::new(0.0, 0.0);
                }
            };
            match xray_hyper(f, gamma, g, q) {
                Ok(e) => {
                    worst.set(worst.get().max(e.error));
                    e.value * g.mu_h().powf(-2.0 * gamma)
                }
                Err(e) => {
                    failed.set(Some(e));
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        q.n_angle,
        0.0,
    );
    if let Some(e) = failed.take() {
        return Err(e);
    }
    let x = bdf_x(z);
    Ok(Estimate { value: est.value / x, error: (est.error + TAU * worst.get()) / x })
}

/// [`normal_operator_at`] over a set of points, in parallel.
pub fn normal_operator(f: &ScalarField, gamma: f64, points: &[DiskPoint], q: &QuadSpec) -> Result<Vec<Estimate>> {
    points.par_iter().map(|&z| normal_operator_at(f, gamma, z, q)).collect()
}

/// Least-squares ratio `Σ N f · f̄ / Σ |f|²` over `points`.
pub fn normal_eigenvalue(f: &ScalarField, gamma: f64, points: &[DiskPoint], q: &QuadSpec) -> Result<Complex64> {
    let nf = normal_operator(f, gamma, points, q)?;
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (e, &z) in nf.iter().zip(points) {
        let v = f.eval(z);
        num += e.value * v.conj();
        den += v.norm_sqr();
    }
    Ok(num / den)
}

/// `(I₀^H x^{2+2γ})* u = x^{−1}(I₀^H)♯ μ_h^{−2γ} u` at an interior point.
pub fn adjoint_at<U>(u: U, gamma: f64, z: DiskPoint, q: &QuadSpec) -> Result<Estimate>
where
    U: Fn(GeodesicHoro) -> Complex64,
{
    check_gamma(gamma)?;
    let e = backproject_hyper(|g| u(g) * g.mu_h().powf(-2.0 * gamma), z, q)?;
    let x = bdf_x(z);
    Ok(Estimate { value: e.value / x, error: e.error / x })
}

/// Empirical constants of the two-sided stability estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityReport {
    pub gamma: f64,
    pub s: f64,
    pub band: usize,
    pub probes: usize,
    /// `min(1, 1+γ)` and `max(1, 1+γ)`.
    pub shift_lower: f64,
    pub shift_upper: f64,
    /// `min ‖f‖_s / ‖Nf‖_{s+shift_lower}` over the probes.
    pub c1: f64,
    /// `max ‖f‖_s / ‖Nf‖_{s+shift_upper}` over the probes.
    pub c2: f64,
    pub two_sided: bool,
}

/// Band-`n_max` transfer matrix of `N = (I₀^H x^{2+2γ})* I₀^H x^{2+2γ}` in
/// the `Φ̂*Z` basis, built from numerical forward transforms of each basis
/// function: column `(n', k')` holds `σₙₖ ⟨I Φ̂*Z_{n'k'}, ψₙₖ^{γ,H}⟩`.
pub fn normal_matrix(gamma: f64, n_max: usize, q: &QuadSpec) -> Result<(Vec<BasisIndex>, Vec<Vec<Complex64>>)> {
    let basis = Arc::new(ZernikeBasis::new(gamma, n_max)?);
    let layout = DataLayout::for_band(gamma, n_max);
    let idx: Vec<BasisIndex> = (0..=n_max).flat_map(|n| (0..=n as i64).map(move |k| BasisIndex::new(n, k))).collect();
    let mut cols = Vec::with_capacity(idx.len());
    for b in &idx {
        let f = ScalarField::zernike_pullback(basis.clone(), b.n, b.k as usize);
        let (data, _) = forward_grid(&f, layout, q)?;
        let c = analyze_data(&data, n_max)?;
        cols.push(idx.iter().map(|r| c.get(r.n, r.k) * basis.sigma(r.n, r.k as usize)).collect());
    }
    Ok((idx, cols))
}

/// Draws `probes` random band-limited phantoms with varied coefficient decay
/// and reports the extreme ratios in the two-sided estimate at level `s`.
pub fn stability_probe(
    gamma: f64,
    s: f64,
    n_max: usize,
    probes: usize,
    seed: u64,
    q: &QuadSpec,
) -> Result<StabilityReport> {
    let (idx, cols) = normal_matrix(gamma, n_max, q)?;
    stability_from_matrix(gamma, s, n_max, probes, seed, &idx, &cols)
}

pub fn stability_from_matrix(
    gamma: f64,
    s: f64,
    n_max: usize,
    probes: usize,
    seed: u64,
    idx: &[BasisIndex],
    cols: &[Vec<Complex64>],
) -> Result<StabilityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift_lower = 1f64.min(1.0 + gamma);
    let shift_upper = 1f64.max(1.0 + gamma);
    let mut c1 = f64::INFINITY;
    let mut c2 = 0.0f64;
    for _ in 0..probes {
        let decay = rng.gen_range(0.0..3.0);
        let mut f = CoeffTable::new_disk(gamma, n_max)?;
        for b in idx {
            let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            f.set(b.n, b.k, v * (b.n as f64 + 1.0).powf(-decay))?;
        }
        let mut nf = CoeffTable::new_disk(gamma, n_max)?;
        for (r, row) in idx.iter().enumerate() {
            let v: Complex64 = idx.iter().zip(cols).map(|(b, col)| col[r] * f.get(b.n, b.k)).sum();
            nf.set(row.n, row.k, v)?;
        }
        let fs = sobolev_norm(&f, s);
        c1 = c1.min(fs / sobolev_norm(&nf, s + shift_lower));
        c2 = c2.max(fs / sobolev_norm(&nf, s + shift_upper));
    }
    let two_sided = c1.is_finite() && c1 > 0.0 && c2.is_finite() && c2 > 0.0;
    Ok(StabilityReport { gamma, s, band: n_max, probes, shift_lower, shift_upper, c1, c2, two_sided })
}

/// How a [`DataInterpolant`] treats the `a` direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InterpMode {
    /// Interpolate the samples themselves.
    Raw,
    /// Interpolate `u/μ_h^{2γ+2}`, exact for band-limited range data.
    Class,
}

/// Evaluates gridded data off the nodes: trigonometric interpolation in `β`
/// followed, per harmonic `l`, by polynomial interpolation in `x = sin α`
/// of the coefficient with its `e^{ilα}` phase removed.
#[derive(Debug, Clone)]
pub struct DataInterpolant {
    gamma: f64,
    mode: InterpMode,
    x_nodes: Vec<f64>,
    bary: Vec<f64>,
    l_max: i64,
    /// `coef[i][l + l_max]`
    coef: Vec<Vec<Complex64>>,
}

impl DataInterpolant {
    pub fn new(grid: &DataGrid, mode: InterpMode) -> Self {
        let lay = grid.layout;
        let nb = lay.n_beta;
        let l_max = ((nb - 1) / 2) as i64;
        let coef = (0..lay.n_alpha)
            .map(|i| {
                let x = grid.x_nodes[i];
                let scale = match mode {
                    InterpMode::Raw => 1.0,
                    InterpMode::Class => (1.0 - x * x).powf(-(lay.gamma + 1.0)),
                };
                let alpha = x.asin();
                (-l_max..=l_max)
                    .map(|l| {
                        let s: Complex64 = (0..nb)
                            .map(|j| grid.get(j, i) * Complex64::from_polar(1.0, -(l as f64) * lay.beta(j)))
                            .sum();
                        s * Complex64::from_polar(scale / nb as f64, -(l as f64) * alpha)
                    })
                    .collect()
            })
            .collect();
        let x = &grid.x_nodes;
        let bary = (0..x.len())
            .map(|i| 1.0 / (0..x.len()).filter(|&j| j != i).map(|j| x[i] - x[j]).product::<f64>())
            .collect();
        Self { gamma: lay.gamma, mode, x_nodes: grid.x_nodes.clone(), bary, l_max, coef }
    }

    fn lagrange(&self, x: f64) -> Vec<f64> {
        if let Some(i) = self.x_nodes.iter().position(|&n| n == x) {
            let mut v = vec![0.0; self.x_nodes.len()];
            v[i] = 1.0;
            return v;
        }
        let t: Vec<f64> = self.x_nodes.iter().zip(&self.bary).map(|(n, b)| b / (x - n)).collect();
        let sum: f64 = t.iter().sum();
        t.iter().map(|v| v / sum).collect()
    }

    pub fn eval(&self, g: GeodesicHoro) -> Complex64 {
        let a = match g.a.finite() {
            Ok(a) => a,
            Err(_) => return Complex64::new(0.0, 0.0),
        };
        let alpha = a.atan();
        let x = alpha.sin();
        let lw = self.lagrange(x);
        let mut out = Complex64::new(0.0, 0.0);
        for l in -self.l_max..=self.l_max {
            let c: Complex64 = self.coef.iter().zip(&lw).map(|(row, w)| row[(l + self.l_max) as usize] * w).sum();
            out += c * Complex64::from_polar(1.0, l as f64 * (g.beta + alpha));
        }
        match self.mode {
            InterpMode::Raw => out,
            InterpMode::Class => out * alpha.cos().powf(2.0 * self.gamma + 2.0),
        }
    }
}

/// `(I₀^H)♯ u` at every node of a disk grid.
pub fn backproject_grid<U>(u: U, layout: DiskLayout, q: &QuadSpec) -> Result<(DiskGrid, usize)>
where
    U: Fn(GeodesicHoro) -> Complex64 + Sync,
{
    let mut grid = DiskGrid::zeros(layout)?;
    let nr = layout.n_radial;
    let pts: Vec<DiskPoint> = (0..grid.samples.len()).map(|p| grid.node_hyper(p / nr, p % nr)).collect();
    let est: Vec<Estimate> = pts.par_iter().map(|&z| backproject_hyper(&u, z, q)).collect::<Result<_>>()?;
    let flags = est.iter().filter(|e| e.flagged(q.abs_tol)).count();
    grid.samples = est.iter().map(|e| e.value).collect();
    Ok((grid, flags))
}

/// Default evaluation points for normal-operator eigenvalue fits.
pub fn probe_points() -> Vec<DiskPoint> {
    vec![
        DiskPoint::from_polar(0.15, 0.3),
        DiskPoint::from_polar(0.35, 2.1),
        DiskPoint::from_polar(0.5, -1.3),
        DiskPoint::from_polar(0.62, 4.0),
    ]
}

/// Angle-averaged kernel used to check `∂_ω` sector preservation.
#[doc(hidden)]
pub fn circle_points(r: f64, m: usize) -> Vec<DiskPoint> {
    (0..m).map(|i| DiskPoint::from_polar(r, TAU * i as f64 / m as f64 + PI / 7.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{geodesic_horo, phi_map};
    use crate::specfun::{psi_nk_gamma_h, sigma_sq};
    use crate::transforms::SmoothnessClass;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn q() -> QuadSpec {
        QuadSpec::default()
    }

    fn random_table(gamma: f64, n: usize, data: bool, seed: u64) -> CoeffTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = if data {
            CoeffTable::new_data(gamma, n, CoeffTable::default_k_max(n)).unwrap()
        } else {
            CoeffTable::new_disk(gamma, n).unwrap()
        };
        let idx: Vec<_> = t.iter().map(|(i, _)| i).collect();
        for i in idx {
            t.set(i.n, i.k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap();
        }
        t
    }

    #[test]
    fn table_windows() {
        let d = CoeffTable::new_disk(0.0, 3).unwrap();
        assert_eq!(d.len(), 10);
        assert!(d.clone().set(2, 3, Complex64::new(1.0, 0.0)).is_err());
        let t = CoeffTable::new_data(0.0, 2, 5).unwrap();
        assert_eq!(t.k_range(0), -5..=5);
        assert_eq!(t.k_range(2), -3..=5);
        assert_eq!(t.get(9, 0), Complex64::new(0.0, 0.0));
        assert!(CoeffTable::new_data(0.0, 4, 3).is_err());
    }

    #[test]
    fn sobolev_examples() {
        let mut t = CoeffTable::new_disk(0.0, 4).unwrap();
        t.set(3, 1, Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(sobolev_norm(&t, 1.0), 4.0, max_relative = 1e-15);
        let r = random_table(0.5, 5, false, 3);
        assert_relative_eq!(sobolev_norm(&r, 0.0), r.l2_norm(), max_relative = 1e-15);
    }

    #[test]
    fn data_round_trip_and_parseval() {
        for (s, gamma) in [-0.5, 0.0, 1.0, 2.5].into_iter().enumerate() {
            let n = 6;
            let c = random_table(gamma, n, true, s as u64);
            let grid = synthesize_data(&c, DataLayout::for_band(gamma, n)).unwrap();
            let back = analyze_data(&grid, n).unwrap();
            assert!(back.sub(&c).max_abs() < 1e-10, "gamma {gamma}: {}", back.sub(&c).max_abs());
            assert_relative_eq!(grid.norm(), c.l2_norm(), max_relative = 1e-10);
        }
    }

    #[test]
    fn data_basis_is_delta() {
        let gamma = 0.7;
        let lay = DataLayout::for_band(gamma, 5);
        for (n, k) in [(0usize, 0i64), (3, 1), (2, -2), (4, 7)] {
            let grid = DataGrid::from_fn(lay, |g| psi_nk_gamma_h(BasisIndex::new(n, k), gamma, g).unwrap()).unwrap();
            let c = analyze_data(&grid, 5).unwrap();
            for (i, v) in c.iter() {
                let expect = if i == BasisIndex::new(n, k) { 1.0 } else { 0.0 };
                assert!((v - expect).norm() < 1e-10, "{i:?} {v}");
            }
        }
    }

    #[test]
    fn data_aliasing_rejected() {
        let lay = DataLayout { gamma: 0.0, n_beta: 8, n_alpha: 6 };
        let grid = DataGrid::zeros(lay).unwrap();
        assert!(matches!(analyze_data(&grid, 4), Err(Error::Aliasing { required: 20, .. })));
        let lay = DataLayout { gamma: 0.0, n_beta: 40, n_alpha: 3 };
        assert!(matches!(analyze_data(&DataGrid::zeros(lay).unwrap(), 4), Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn disk_round_trip_and_parseval() {
        for (s, gamma) in [-0.5, 0.0, 1.0].into_iter().enumerate() {
            let n = 7;
            let c = random_table(gamma, n, false, 10 + s as u64);
            let grid = synthesize_disk(&c, DiskLayout::for_band(gamma, n)).unwrap();
            let back = analyze_disk(&grid, n).unwrap();
            assert!(back.sub(&c).max_abs() < 1e-10);
            assert_relative_eq!(grid.norm(), c.l2_norm(), max_relative = 1e-10);
        }
        let lay = DiskLayout { gamma: 0.0, n_angle: 5, n_radial: 4 };
        assert!(analyze_disk(&DiskGrid::zeros(lay).unwrap(), 4).is_err());
    }

    #[test]
    fn forward_zernike_is_single_entry() {
        let gamma = 0.0;
        let basis = Arc::new(ZernikeBasis::new(gamma, 3).unwrap());
        let f = ScalarField::zernike_pullback(basis.clone(), 3, 1);
        let (data, flags) = forward_grid(&f, DataLayout::for_band(gamma, 5), &q()).unwrap();
        assert_eq!(flags, 0);
        let c = analyze_data(&data, 5).unwrap();
        for (i, v) in c.iter() {
            let expect = if i == BasisIndex::new(3, 1) { basis.sigma(3, 1) } else { 0.0 };
            assert!((v - expect).norm() < 1e-9, "{i:?} {v}");
        }
    }

    fn reconstruct_case(gamma: f64) {
        let basis = Arc::new(ZernikeBasis::new(gamma, 5).unwrap());
        let b = basis.clone();
        let f = ScalarField::new(DiskModel::Poincare, SmoothnessClass::Even, move |z| {
            let w = phi_map(z);
            b.eval_normalized(3, 1, w) + b.eval_normalized(5, 2, w) * 2.0
        });
        let n = 6;
        let (data, _) = forward_grid(&f, DataLayout::for_band(gamma, n), &q()).unwrap();
        let rec = svd_reconstruct(&data, n, SpectralFilter::Truncate, None).unwrap();
        let truth = DiskGrid::from_fn(rec.grid.layout, |z| f.eval(z)).unwrap();
        let err = rec.grid.sub(&truth).unwrap().norm() / truth.norm();
        assert!(err < 1e-6, "gamma {gamma}: {err}");
        assert!(rec.out_of_range_norm < 1e-8);
    }

    #[test]
    fn reconstruct_band_limited_gamma_zero() {
        reconstruct_case(0.0);
    }

    #[test]
    fn reconstruct_band_limited_gamma_one() {
        reconstruct_case(1.0);
    }

    #[test]
    fn reconstruct_kernel_element() {
        let lay = DataLayout::for_band(0.0, 4);
        let grid = DataGrid::from_fn(lay, |g| psi_nk_gamma_h(BasisIndex::new(1, -1), 0.0, g).unwrap()).unwrap();
        let rec = svd_reconstruct(&grid, 4, SpectralFilter::Truncate, None).unwrap();
        assert!(rec.grid.norm() < 1e-10);
        assert_relative_eq!(rec.out_of_range_norm, 1.0, max_relative = 1e-10);
        assert_eq!(rec.out_of_range(1e-6)[0].0, BasisIndex::new(1, -1));
    }

    #[test]
    fn tikhonov_damps() {
        let f = SpectralFilter::Tikhonov(0.5);
        assert!(f.inverse(1.0) < SpectralFilter::Truncate.inverse(1.0));
        assert_relative_eq!(SpectralFilter::Tikhonov(0.0).inverse(2.0), 0.5);
    }

    #[test]
    fn adjoint_annihilates_kernel() {
        for gamma in [-0.5, 0.0, 1.0] {
            for (n, k) in [(0usize, -1i64), (2, 3), (3, -2)] {
                for z in [DiskPoint::new(0.1, 0.3), DiskPoint::new(-0.5, 0.2)] {
                    let e = adjoint_at(|g| psi_nk_gamma_h(BasisIndex::new(n, k), gamma, g).unwrap(), gamma, z, &q())
                        .unwrap();
                    assert!(e.value.norm() < 1e-9, "{gamma} {n} {k}: {}", e.value);
                }
            }
        }
    }

    #[test]
    fn adjoint_maps_psi_to_zernike() {
        // (I x^{2+2γ})* ψₙₖ^{γ,H} = σₙₖ Φ̂*Zₙₖ^γ
        let gamma = 0.5;
        let basis = ZernikeBasis::new(gamma, 4).unwrap();
        for (n, k) in [(0usize, 0usize), (2, 1), (4, 3)] {
            let z = DiskPoint::new(0.2, -0.4);
            let e = adjoint_at(|g| psi_nk_gamma_h(BasisIndex::new(n, k as i64), gamma, g).unwrap(), gamma, z, &q())
                .unwrap();
            let expect = basis.eval_normalized(n, k, phi_map(z)) * basis.sigma(n, k);
            assert!((e.value - expect).norm() < 1e-9 * expect.norm().max(1.0));
        }
    }

    #[test]
    fn l_gamma_constant_and_eigen() {
        let one = ScalarField::new(DiskModel::Poincare, SmoothnessClass::Even, |_| Complex64::new(1.0, 0.0));
        let z = DiskPoint::new(0.3, 0.2);
        let v = apply_l_gamma_h(&one, 0.0, z, &FdSpec::default()).unwrap();
        assert!((v - 1.0).norm() < 1e-8);
        for gamma in [0.0, 1.0, -0.5] {
            let basis = Arc::new(ZernikeBasis::new(gamma, 5).unwrap());
            for (n, k) in [(3usize, 1usize), (5, 4), (2, 2)] {
                let f = ScalarField::zernike_pullback(basis.clone(), n, k);
                for z in [DiskPoint::new(0.3, 0.2), DiskPoint::new(-0.1, -0.6)] {
                    let got = apply_l_gamma_h(&f, gamma, z, &FdSpec::default()).unwrap();
                    let expect = f.eval(z) * (n as f64 + 1.0 + gamma).powi(2);
                    assert!((got - expect).norm() < 1e-4 * expect.norm(), "{gamma} {n} {k}: {got} {expect}");
                }
            }
        }
        assert!(apply_l_gamma_h(&one, 0.0, DiskPoint::new(0.0, 0.0), &FdSpec::default()).is_err());
    }

    #[test]
    fn t_gamma_eigen() {
        for gamma in [0.0, 1.0, -0.5] {
            for (n, k) in [(3usize, 1i64), (0, 0), (2, -1), (4, 6)] {
                for g in [GeodesicHoro::new(0.4, 0.3), GeodesicHoro::new(2.0, -1.7)] {
                    let u = |g: GeodesicHoro| psi_nk_gamma_h(BasisIndex::new(n, k), gamma, g).unwrap();
                    let got = apply_t_gamma_h(u, gamma, g, &FdSpec::default()).unwrap();
                    let expect = u(g) * (n as f64 + 1.0 + gamma).powi(2);
                    assert!((got - expect).norm() < 1e-5 * expect.norm().max(1e-3), "{gamma} {n} {k}: {got} {expect}");
                }
            }
        }
    }

    #[test]
    fn intertwining_l_and_t() {
        let gamma = 0.0;
        let f = ScalarField::new(DiskModel::Poincare, SmoothnessClass::Even, |z| {
            let w = phi_map(z).z();
            Complex64::new(1.0, 0.0) + w * 0.4 - w.conj() * w * 0.3 + w.conj().powu(2) * 0.2
        });
        let fd = FdSpec::default();
        let ff = f.clone();
        let lf = ScalarField::new(DiskModel::Poincare, SmoothnessClass::Even, move |z| {
            apply_l_gamma_h(&ff, gamma, z, &fd).unwrap_or(Complex64::new(0.0, 0.0))
        });
        for g in [GeodesicHoro::new(0.3, 0.9), GeodesicHoro::new(2.5, -1.4), GeodesicHoro::new(5.0, 3.0)] {
            let lhs = xray_hyper(&lf, gamma, g, &q()).unwrap().value;
            let rhs = apply_t_gamma_h(|h| xray_hyper(&f, gamma, h, &q()).unwrap().value, gamma, g, &fd).unwrap();
            assert!((lhs - rhs).norm() < 1e-4 * rhs.norm().max(1e-2), "{lhs} {rhs}");
        }
        // the geodesic stays away from the origin, where (x, ω) degenerate
        let (z, _) = geodesic_horo(GeodesicHoro::new(0.3, 0.9), 0.0).unwrap();
        assert!(bdf_x(z) < 0.9);
    }

    #[test]
    fn normal_operator_on_basis() {
        let basis = Arc::new(ZernikeBasis::new(0.0, 3).unwrap());
        let f = ScalarField::zernike_pullback(basis.clone(), 0, 0);
        let lam = normal_eigenvalue(&f, 0.0, &probe_points(), &q()).unwrap();
        assert_relative_eq!(lam.re, 4.0 * PI, max_relative = 1e-6);
        for gamma in [-0.5, 1.0] {
            let basis = Arc::new(ZernikeBasis::new(gamma, 3).unwrap());
            let f = ScalarField::zernike_pullback(basis, 3, 1);
            let lam = normal_eigenvalue(&f, gamma, &probe_points(), &q()).unwrap();
            let expect = sigma_sq(BasisIndex::new(3, 1), gamma).unwrap();
            assert!((lam - expect).norm() < 1e-6 * expect);
        }
    }

    #[test]
    fn normal_operator_linear() {
        let basis = Arc::new(ZernikeBasis::new(0.0, 3).unwrap());
        let (b1, b2) = (basis.clone(), basis.clone());
        let f = ScalarField::new(DiskModel::Poincare, SmoothnessClass::Even, move |z| {
            b1.eval_normalized(1, 0, phi_map(z)) * 2.0 - b2.eval_normalized(3, 2, phi_map(z))
        });
        let z = DiskPoint::new(0.25, -0.3);
        let got = normal_operator_at(&f, 0.0, z, &q()).unwrap().value;
        let w = phi_map(z);
        let expect = basis.eval_normalized(1, 0, w) * 2.0 * (2.0 * PI) - basis.eval_normalized(3, 2, w) * PI;
        assert!((got - expect).norm() < 1e-6 * expect.norm());
    }

    #[test]
    fn normal_operator_preserves_sectors() {
        // f = Φ̂*Z₂₀ has angular index 2; the output on a circle must too.
        let basis = Arc::new(ZernikeBasis::new(0.0, 2).unwrap());
        let f = ScalarField::zernike_pullback(basis, 2, 0);
        let pts = circle_points(0.4, 12);
        let vals = normal_operator(&f, 0.0, &pts, &QuadSpec { n_angle: 64, ..q() }).unwrap();
        let total: f64 = vals.iter().map(|e| e.value.norm_sqr()).sum();
        let mut leak = 0.0;
        for m in -5i64..=6 {
            if m == 2 {
                continue;
            }
            let c: Complex64 = vals
                .iter()
                .zip(&pts)
                .map(|(e, z)| e.value * Complex64::from_polar(1.0, -(m as f64) * z.omega()))
                .sum::<Complex64>()
                / 12.0;
            leak += c.norm_sqr();
        }
        assert!(leak.sqrt() < 1e-8 * (total / 12.0).sqrt());
    }

    #[test]
    fn gamma_zero_sharp_norm() {
        // ‖f‖ = (4π)^{−1/2} ‖I f‖ with the data side weighted by (n+1)^{1/2}.
        let basis = Arc::new(ZernikeBasis::new(0.0, 4).unwrap());
        let b = basis.clone();
        let f = ScalarField::new(DiskModel::Poincare, SmoothnessClass::Even, move |z| {
            let w = phi_map(z);
            b.eval_normalized(0, 0, w) * Complex64::new(0.3, 1.0) + b.eval_normalized(4, 1, w)
                - b.eval_normalized(2, 2, w)
        });
        let (data, _) = forward_grid(&f, DataLayout::for_band(0.0, 4), &q()).unwrap();
        let u = analyze_data(&data, 4).unwrap();
        let fgrid = DiskGrid::from_fn(DiskLayout::for_band(0.0, 4), |z| f.eval(z)).unwrap();
        assert_relative_eq!(fgrid.norm(), sobolev_norm(&u, 0.5) / (4.0 * PI).sqrt(), max_relative = 1e-6);
    }

    #[test]
    fn stability_constants_finite() {
        let r = stability_probe(0.0, 0.0, 4, 10, 7, &q()).unwrap();
        assert!(r.two_sided);
        assert!(r.c1 > 0.0 && r.c2 < 1e6);
    }

    #[test]
    fn interpolant_exact_on_band_limited_data() {
        let gamma = 0.5;
        let c = random_table(gamma, 5, true, 99);
        let lay = DataLayout::for_band(gamma, 5);
        let grid = synthesize_data(&c, lay).unwrap();
        let it = DataInterpolant::new(&grid, InterpMode::Class);
        for g in [GeodesicHoro::new(0.123, 0.77), GeodesicHoro::new(4.0, -3.2)] {
            let direct: Complex64 = c.iter().map(|(i, v)| v * psi_nk_gamma_h(i, gamma, g).unwrap()).sum();
            assert!((it.eval(g) - direct).norm() < 1e-9 * direct.norm().max(1.0));
        }
        let konst = DataGrid::from_fn(lay, |_| Complex64::new(3.0, 0.0)).unwrap();
        let it = DataInterpolant::new(&konst, InterpMode::Raw);
        assert!((it.eval(GeodesicHoro::new(1.0, 0.4)) - 3.0).norm() < 1e-12);
    }

    #[test]
    fn backproject_constant_grid() {
        let (g, flags) = backproject_grid(|_| Complex64::new(1.0, 0.0), DiskLayout::for_band(0.0, 3), &q()).unwrap();
        assert_eq!(flags, 0);
        assert!(g.samples.iter().all(|v| (v - TAU).norm() < 1e-12));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn data_parseval_random(seed in 0u64..1000, gi in 0usize..3, n in 0usize..8) {
            let gamma = [-0.5, 0.0, 1.0][gi];
            let c = random_table(gamma, n, true, seed);
            let grid = synthesize_data(&c, DataLayout::for_band(gamma, n)).unwrap();
            prop_assert!((grid.norm() - c.l2_norm()).abs() < 1e-8 * c.l2_norm());
        }
    }
}
