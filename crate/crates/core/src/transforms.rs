//! Weighted X-ray transforms, backprojections and the Santaló check.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_gamma, Error, Result};
use crate::geometry::{
    footprint, footprint_euclid, geodesic_euclid, horo_state, mu_h_finite, phi_map, DiskPoint, ExtReal, FanBeamCoord,
    GeodesicHoro, UnitTangent,
};
use crate::grid::{DataGrid, DataLayout};
use crate::quadrature::{de_line_integral, gauss_jacobi_cached, gauss_legendre, periodic_trapezoid_adaptive, Estimate};
use crate::specfun::ZernikeBasis;

/// Which disk a scalar field lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiskModel {
    Euclidean,
    Poincare,
}

/// Whether a field on the Poincaré disk is smooth in `x²` up to the
/// boundary (`C_ev`) or merely smooth in the interior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SmoothnessClass {
    Even,
    Generic,
}

/// Quadrature configuration shared by the integral operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    /// Gauss–Jacobi nodes on Euclidean chords.
    pub n_chord: usize,
    /// Step `2^{−ts_level}` of the double-exponential line rule.
    pub ts_level: u32,
    /// Trapezoid nodes on fibers.
    pub n_angle: usize,
    pub abs_tol: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self { n_chord: 32, ts_level: 6, n_angle: 128, abs_tol: 1e-9 }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_chord < 4 || self.n_angle < 4 || self.ts_level < 2 {
            return Err(Error::InvalidQuadSpec(format!("{self:?}: node counts must be at least 4")));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidQuadSpec("abs_tol must be positive".into()));
        }
        Ok(())
    }
}

type FieldFn = dyn Fn(DiskPoint) -> Complex64 + Send + Sync;

/// A function on one of the two disks.
#[derive(Clone)]
pub struct ScalarField {
    pub model: DiskModel,
    pub class: SmoothnessClass,
    f: Arc<FieldFn>,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField").field("model", &self.model).field("class", &self.class).finish()
    }
}

impl ScalarField {
    pub fn new<F>(model: DiskModel, class: SmoothnessClass, f: F) -> Self
    where
        F: Fn(DiskPoint) -> Complex64 + Send + Sync + 'static,
    {
        Self { model, class, f: Arc::new(f) }
    }

    pub fn euclidean<F>(f: F) -> Self
    where
        F: Fn(DiskPoint) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(DiskModel::Euclidean, SmoothnessClass::Even, f)
    }

    #[inline]
    pub fn eval(&self, z: DiskPoint) -> Complex64 {
        (self.f)(z)
    }

    /// `Φ* f` for a field on the Euclidean disk.
    pub fn pullback(&self) -> Result<ScalarField> {
        self.require(DiskModel::Euclidean)?;
        let f = self.f.clone();
        Ok(Self::new(DiskModel::Poincare, SmoothnessClass::Even, move |z| f(phi_map(z))))
    }

    /// `Φ̂*Zₙₖ^γ = Φ*(Zₙₖ^γ/σₙₖ^γ)`, the unit-norm right singular function.
    pub fn zernike_pullback(basis: Arc<ZernikeBasis>, n: usize, k: usize) -> Self {
        Self::new(DiskModel::Poincare, SmoothnessClass::Even, move |z| basis.eval_normalized(n, k, phi_map(z)))
    }

    pub fn require(&self, model: DiskModel) -> Result<()> {
        if self.model == model {
            Ok(())
        } else {
            Err(Error::ModelMismatch { expected: model, found: self.model })
        }
    }
}

/// `I₀^E(d^γ f)(β, α) = μ^{2γ+1} ∫₋₁¹ (1−t²)^γ f(e^{i(β+π+α)}(t cos α + i sin α)) dt`.
pub fn xray_euclid(f: &ScalarField, gamma: f64, c: FanBeamCoord, q: &QuadSpec) -> Result<Estimate> {
    f.require(DiskModel::Euclidean)?;
    check_gamma(gamma)?;
    if !c.is_incoming() {
        return Err(Error::Shape(format!("fan-beam angle {} is not inward pointing", c.alpha)));
    }
    let mu = c.mu().max(0.0);
    let integral = |n: usize| -> Result<Complex64> {
        let rule = gauss_jacobi_cached(n, gamma, gamma)?;
        Ok(rule.integrate(|t| f.eval(geodesic_euclid(c, t * mu))))
    };
    let coarse = integral(q.n_chord)?;
    let fine = integral(2 * q.n_chord)?;
    let scale = mu.powf(2.0 * gamma + 1.0);
    Ok(Estimate { value: fine * scale, error: (fine - coarse).norm() * scale })
}

/// `I₀^H(x^{2+2γ} f)(β, a) = ∫_ℝ x(γ_{β,a}(t))^{2+2γ} f(γ_{β,a}(t)) dt`.
/// The line integral is centred at `t₀ = log μ_h(a)`, where
/// `x(γ(t)) = μ_h/cosh(t − t₀)`. Vanishes at `a = ±∞`.
pub fn xray_hyper(f: &ScalarField, gamma: f64, g: GeodesicHoro, q: &QuadSpec) -> Result<Estimate> {
    f.require(DiskModel::Poincare)?;
    check_gamma(gamma)?;
    let a = match g.a {
        ExtReal::Finite(a) => a,
        _ => return Ok(Estimate::exact(Complex64::new(0.0, 0.0))),
    };
    let mu = mu_h_finite(a);
    let t0 = mu.ln();
    let p = 2.0 + 2.0 * gamma;
    Ok(de_line_integral(
        |t| {
            let x = mu / (t - t0).cosh();
            if x == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let st = horo_state(g, t).expect("finite a");
            f.eval(st.z.into()) * x.powf(p)
        },
        t0,
        p,
        q.ts_level,
    ))
}

/// Euclidean backprojection `(I₀^E)♯u(w) = ∫₀^{2π} u(footprint_E(w, θ)) dθ`.
pub fn backproject_euclid<U>(u: U, w: DiskPoint, q: &QuadSpec) -> Estimate
where
    U: Fn(FanBeamCoord) -> Complex64,
{
    periodic_trapezoid_adaptive(
        |theta| u(footprint_euclid(w, theta)),
        q.n_angle,
        0.0,
        q.abs_tol,
        q.n_angle * MAX_FIBER_REFINE,
    )
}

/// Fiber rules refine up to this multiple of `QuadSpec::n_angle`.
pub const MAX_FIBER_REFINE: usize = 64;

/// Hyperbolic backprojection `(I₀^H)♯u(z) = ∫₀^{2π} u(π_h(z, θ)) dθ`.
pub fn backproject_hyper<U>(u: U, z: DiskPoint, q: &QuadSpec) -> Result<Estimate>
where
    U: Fn(GeodesicHoro) -> Complex64,
{
    let z = z.require_interior()?;
    Ok(periodic_trapezoid_adaptive(
        |theta| u(footprint(UnitTangent { z, theta }).expect("interior point")),
        q.n_angle,
        0.0,
        q.abs_tol,
        q.n_angle * MAX_FIBER_REFINE,
    ))
}

/// Forward data `I₀^H x^{2+2γ} f` on every node of a data grid; also
/// returns how many line integrals exceeded `q.abs_tol`.
pub fn forward_grid(f: &ScalarField, layout: DataLayout, q: &QuadSpec) -> Result<(DataGrid, usize)> {
    q.validate()?;
    f.require(DiskModel::Poincare)?;
    let mut grid = DataGrid::zeros(layout)?;
    let na = layout.n_alpha;
    let nodes: Vec<GeodesicHoro> = (0..grid.samples.len()).map(|p| grid.node(p / na, p % na)).collect();
    let est: Vec<Estimate> = nodes.par_iter().map(|&g| xray_hyper(f, layout.gamma, g, q)).collect::<Result<_>>()?;
    let flags = est.iter().filter(|e| e.flagged(q.abs_tol)).count();
    grid.samples = est.iter().map(|e| e.value).collect();
    Ok((grid, flags))
}

/// Node counts for [`santalo_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SantaloSpec {
    pub n_beta: usize,
    pub n_a: usize,
    pub n_t: usize,
    pub n_r: usize,
    pub n_omega: usize,
    pub n_theta: usize,
}

impl Default for SantaloSpec {
    fn default() -> Self {
        Self { n_beta: 48, n_a: 160, n_t: 160, n_r: 96, n_omega: 48, n_theta: 48 }
    }
}

/// Gauss–Legendre rule mapped to `[lo, hi]` and split into `panels` pieces.
fn composite_gl(lo: f64, hi: f64, n: usize, panels: usize) -> Result<Vec<(f64, f64)>> {
    let rule = gauss_legendre(n.div_ceil(panels).max(2))?;
    let width = (hi - lo) / panels as f64;
    let mut out = Vec::with_capacity(rule.len() * panels);
    for p in 0..panels {
        let a = lo + p as f64 * width;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            out.push((a + 0.5 * width * (x + 1.0), 0.5 * width * w));
        }
    }
    Ok(out)
}

/// Both sides of Santaló's formula for `F` on the unit tangent bundle:
/// `∫_G ∫_ℝ F(φ_t) dt dβ da` and `∫_{D_H} ∫ F dθ dV_H` with
/// `dV_H = 4/(1−|z|²)² dA`. `F` must vanish where `x < eps`.
pub fn santalo_check<F>(f: F, eps: f64, spec: &SantaloSpec) -> Result<(f64, f64)>
where
    F: Fn(UnitTangent) -> f64 + Sync,
{
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::SupportViolation(eps));
    }
    // Probe the excluded collar x < eps.
    for r_frac in [0.2, 0.5, 0.8] {
        let x = eps * r_frac;
        let r = ((1.0 - x) / (1.0 + x)).sqrt();
        for j in 0..16 {
            let z = DiskPoint::from_polar(r, TAU * j as f64 / 16.0);
            for theta in [0.0, 1.0, 2.5, 4.0] {
                if f(UnitTangent { z, theta }) != 0.0 {
                    return Err(Error::SupportViolation(eps));
                }
            }
        }
    }
    let a_max = (1.0 / (eps * eps) - 1.0).sqrt();
    let a_nodes = composite_gl(-a_max, a_max, spec.n_a, 4)?;
    let lhs: f64 = (0..spec.n_beta)
        .into_par_iter()
        .map(|j| {
            let beta = TAU * j as f64 / spec.n_beta as f64;
            let mut acc = 0.0;
            for &(a, wa) in &a_nodes {
                let mu = mu_h_finite(a);
                if mu <= eps {
                    continue;
                }
                let t0 = mu.ln();
                let half = (mu / eps).acosh();
                let g = GeodesicHoro::new(beta, a);
                let t_nodes = composite_gl(t0 - half, t0 + half, spec.n_t, 4).expect("valid rule");
                for (t, wt) in t_nodes {
                    let st = horo_state(g, t).expect("finite a");
                    let v = UnitTangent { z: st.z.into(), theta: st.velocity.arg() };
                    acc += f(v) * wt * wa;
                }
            }
            acc * TAU / spec.n_beta as f64
        })
        .sum();
    let r_max = ((1.0 - eps) / (1.0 + eps)).sqrt();
    let r_nodes = composite_gl(0.0, r_max, spec.n_r, 2)?;
    let rhs: f64 = r_nodes
        .par_iter()
        .map(|&(r, wr)| {
            let dv = 4.0 * r / (1.0 - r * r).powi(2);
            let mut acc = 0.0;
            for i in 0..spec.n_omega {
                let z = DiskPoint::from_polar(r, TAU * i as f64 / spec.n_omega as f64);
                for m in 0..spec.n_theta {
                    let theta = TAU * m as f64 / spec.n_theta as f64;
                    acc += f(UnitTangent { z, theta });
                }
            }
            acc * dv * wr * (TAU / spec.n_omega as f64) * (TAU / spec.n_theta as f64)
        })
        .sum();
    Ok((lhs, rhs))
}

/// Smooth bump `exp(1 − 1/(1 − ((x−c)/w)²))` supported in `|x − c| < w`.
pub fn bump(x: f64, center: f64, width: f64) -> f64 {
    let s = (x - center) / width;
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// `∫₀^{2π}` over a fiber with the Euclidean direction measure at `Φ(z)`,
/// weighted by `μ^{−2}`: the right-hand side of the backprojection
/// intertwining, `d^{1/2}(I₀^E)♯ μ^{−2} Ψ^{−*} u` at `Φ(z)`.
pub fn backproject_via_euclid<U>(u: U, z: DiskPoint, q: &QuadSpec) -> Result<Estimate>
where
    U: Fn(GeodesicHoro) -> Complex64,
{
    let z = z.require_interior()?;
    let w = phi_map(z);
    let d_half = (1.0 - w.abs2()).max(0.0).sqrt();
    let est = backproject_euclid(
        |c| {
            let alpha = c.alpha.clamp(-FRAC_PI_2, FRAC_PI_2);
            let cos2 = alpha.cos().powi(2);
            if cos2 == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            u(GeodesicHoro::new(c.beta, alpha.tan())) / cos2
        },
        w,
        q,
    );
    Ok(Estimate { value: est.value * d_half, error: est.error * d_half })
}

/// Angle of the chord through the origin for `β`; used by tests.
#[doc(hidden)]
pub fn diameter(beta: f64) -> GeodesicHoro {
    GeodesicHoro::new(beta + PI, 0.0)
}
