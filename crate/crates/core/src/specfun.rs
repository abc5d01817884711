//! Orthogonal families: normalized symmetric Jacobi polynomials `pₙ^γ`,
//! the boundary bases `ψₙₖ^γ`, `ψₙₖ`, `φₙₖ`, generalized Zernike
//! polynomials `Zₙₖ^γ`, and the singular values `σₙₖ^γ`.
//!
//! Conventions:
//! * `pₙ^γ` is proportional to `Pₙ^{(γ+1/2, γ+1/2)}`, with
//!   `∫₋₁¹ (pₙ^γ)² (1−x²)^{γ+1/2} dx = 1/(2π)` and `pₙ^γ(1) > 0`.
//! * `Zₙₖ^γ` is the Euclidean backprojection of `μ^{−2γ−1} ψₙₖ^γ`. It is
//!   evaluated through `r^{|l|} P_m^{(γ,|l|)}(2r²−1) e^{ilω}` with
//!   `l = n − 2k`, `m = min(k, n−k)`, scaled to agree with the
//!   backprojection at `w = 1`.

use std::f64::consts::{FRAC_PI_2, LN_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{check_gamma, Error, Result};
use crate::geometry::{mu_h_finite, DiskPoint, GeodesicHoro};

/// `log B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// A weight exponent `γ > −1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaWeight(f64);

impl GammaWeight {
    pub fn new(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self(gamma))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Index `(n, k)` of a basis function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisIndex {
    pub n: usize,
    pub k: i64,
}

impl BasisIndex {
    pub fn new(n: usize, k: i64) -> Self {
        Self { n, k }
    }

    /// Angular index `l = n − 2k`.
    pub fn l(self) -> i64 {
        self.n as i64 - 2 * self.k
    }

    pub fn in_band(self) -> bool {
        self.k >= 0 && self.k <= self.n as i64
    }

    pub fn require_in_band(self) -> Result<Self> {
        if self.in_band() {
            Ok(self)
        } else {
            Err(Error::IndexOutOfBand { n: self.n, k: self.k })
        }
    }
}

/// Standard Jacobi polynomial `Pₙ^{(α,β)}(x)`.
pub fn jacobi_standard(n: usize, alpha: f64, beta: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let ab = alpha + beta;
    let mut p0 = 1.0;
    let mut p1 = 0.5 * (alpha - beta + (ab + 2.0) * x);
    for j in 2..=n {
        let j = j as f64;
        let c = 2.0 * j + ab;
        let a1 = 2.0 * j * (j + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (c * (c - 2.0) * x + alpha * alpha - beta * beta);
        let a3 = 2.0 * (j + alpha - 1.0) * (j + beta - 1.0) * c;
        let p2 = (a2 * p1 - a3 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `log hₙ` for `hₙ = ∫ (Pₙ^{(λ,λ)})² (1−x²)^λ dx`.
fn ln_sym_jacobi_norm(n: usize, lambda: f64) -> f64 {
    let nf = n as f64;
    (2.0 * lambda + 1.0) * LN_2 - (2.0 * nf + 2.0 * lambda + 1.0).ln() + 2.0 * ln_gamma(nf + lambda + 1.0)
        - ln_gamma(nf + 1.0)
        - ln_gamma(nf + 2.0 * lambda + 1.0)
}

/// Normalized symmetric Jacobi polynomial `pₙ^γ(x)`.
pub fn jacobi_p(n: i64, gamma: f64, x: f64) -> Result<f64> {
    if n < 0 {
        return Err(Error::NegativeDegree(n));
    }
    check_gamma(gamma)?;
    let lambda = gamma + 0.5;
    let n = n as usize;
    let scale = (-0.5 * (TAU.ln() + ln_sym_jacobi_norm(n, lambda))).exp();
    Ok(scale * jacobi_standard(n, lambda, lambda, x))
}

/// The family `p₀^γ, …, p_N^γ` with precomputed normalizations.
#[derive(Debug, Clone)]
pub struct JacobiFamily {
    gamma: f64,
    scale: Vec<f64>,
}

impl JacobiFamily {
    pub fn new(gamma: f64, n_max: usize) -> Result<Self> {
        check_gamma(gamma)?;
        let lambda = gamma + 0.5;
        let scale = (0..=n_max).map(|n| (-0.5 * (TAU.ln() + ln_sym_jacobi_norm(n, lambda))).exp()).collect();
        Ok(Self { gamma, scale })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_max(&self) -> usize {
        self.scale.len() - 1
    }

    /// Values `pₙ^γ(x)` for `n = 0..=n_max`.
    pub fn eval_all(&self, x: f64) -> Vec<f64> {
        let lambda = self.gamma + 0.5;
        let ab = 2.0 * lambda;
        let nmax = self.n_max();
        let mut out = Vec::with_capacity(nmax + 1);
        let mut p0 = 1.0;
        out.push(p0 * self.scale[0]);
        if nmax == 0 {
            return out;
        }
        let mut p1 = 0.5 * (ab + 2.0) * x;
        out.push(p1 * self.scale[1]);
        for j in 2..=nmax {
            let jf = j as f64;
            let c = 2.0 * jf + ab;
            let a1 = 2.0 * jf * (jf + ab) * (c - 2.0);
            let a2 = (c - 1.0) * c * (c - 2.0) * x;
            let a3 = 2.0 * (jf + lambda - 1.0).powi(2) * c;
            let p2 = (a2 * p1 - a3 * p0) / a1;
            p0 = p1;
            p1 = p2;
            out.push(p1 * self.scale[j]);
        }
        out
    }

    pub fn eval(&self, n: usize, x: f64) -> f64 {
        let lambda = self.gamma + 0.5;
        self.scale[n] * jacobi_standard(n, lambda, lambda, x)
    }
}

/// `ψₙₖ^γ(β, α) = cos^{2γ+1}α · e^{i(n−2k)(β+α+π/2)} · pₙ^γ(sin α)`.
pub fn psi_nk_gamma(idx: BasisIndex, gamma: f64, beta: f64, alpha: f64) -> Result<Complex64> {
    let p = jacobi_p(idx.n as i64, gamma, alpha.sin())?;
    Ok(psi_from_p(idx, gamma, beta, alpha, p))
}

#[inline]
pub(crate) fn psi_from_p(idx: BasisIndex, gamma: f64, beta: f64, alpha: f64, p: f64) -> Complex64 {
    let c = alpha.cos().max(0.0);
    let phase = idx.l() as f64 * (beta + alpha + FRAC_PI_2);
    Complex64::from_polar(c.powf(2.0 * gamma + 1.0) * p, phase)
}

/// Selector for the `γ = 0` boundary bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroBasis {
    Psi,
    Phi,
}

/// `ψₙₖ, φₙₖ = ((−1)ⁿ/2π) e^{i(n−2k)(β+α)} (e^{i(n+1)α} ± (−1)ⁿ e^{−i(n+1)α})`.
pub fn psi_phi_zero(idx: BasisIndex, which: ZeroBasis, beta: f64, alpha: f64) -> Complex64 {
    let sign_n = if idx.n % 2 == 0 { 1.0 } else { -1.0 };
    let pm = match which {
        ZeroBasis::Psi => sign_n,
        ZeroBasis::Phi => -sign_n,
    };
    let m = (idx.n + 1) as f64 * alpha;
    let bracket = Complex64::from_polar(1.0, m) + Complex64::from_polar(pm, -m);
    Complex64::from_polar(sign_n / TAU, idx.l() as f64 * (beta + alpha)) * bracket
}

/// `ψₙₖ^{γ,H}(β, a) = μ_h(a) ψₙₖ^γ(β, atan a)`.
pub fn psi_nk_gamma_h(idx: BasisIndex, gamma: f64, g: GeodesicHoro) -> Result<Complex64> {
    let a = g.a_finite()?;
    Ok(psi_nk_gamma(idx, gamma, g.beta, a.atan())? * mu_h_finite(a))
}

/// `(σₙₖ^γ)² = 2^{2γ+2}π/(n+1) · B(n−k+1+γ, k+1+γ)/B(n−k+1, k+1)`.
pub fn sigma_sq(idx: BasisIndex, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    idx.require_in_band()?;
    let n = idx.n as f64;
    let k = idx.k as f64;
    let ln = (2.0 * gamma + 2.0) * LN_2 + PI.ln() - (n + 1.0).ln() + ln_beta(n - k + 1.0 + gamma, k + 1.0 + gamma)
        - ln_beta(n - k + 1.0, k + 1.0);
    Ok(ln.exp())
}

pub fn sigma_nk(idx: BasisIndex, gamma: f64) -> Result<f64> {
    Ok(sigma_sq(idx, gamma)?.sqrt())
}

/// Generalized Zernike polynomials `Zₙₖ^γ` for `n ≤ n_max`, with the
/// per-index constants pinned against the backprojection definition.
#[derive(Debug, Clone)]
pub struct ZernikeBasis {
    gamma: f64,
    n_max: usize,
    consts: Vec<Vec<Complex64>>,
    sigmas: Vec<Vec<f64>>,
}

impl ZernikeBasis {
    pub fn new(gamma: f64, n_max: usize) -> Result<Self> {
        check_gamma(gamma)?;
        let fam = JacobiFamily::new(gamma, n_max)?;
        let mut consts = Vec::with_capacity(n_max + 1);
        let mut sigmas = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            // Backprojection at w = 1 is a trigonometric polynomial of degree ≤ 2n
            // in θ, so 2n + 2 trapezoid nodes integrate it exactly.
            let m_nodes = 2 * n + 2;
            let h = TAU / m_nodes as f64;
            let pn: Vec<f64> = (0..m_nodes).map(|j| fam.eval(n, -(j as f64 * h).sin())).collect();
            let mut row = Vec::with_capacity(n + 1);
            let mut srow = Vec::with_capacity(n + 1);
            for k in 0..=n {
                let idx = BasisIndex::new(n, k as i64);
                let l = idx.l() as f64;
                let bp: Complex64 = (0..m_nodes)
                    .map(|j| Complex64::from_polar(pn[j], l * (j as f64 * h - FRAC_PI_2)))
                    .sum::<Complex64>()
                    * h;
                let m = k.min(n - k) as f64;
                let r1 = (ln_gamma(m + gamma + 1.0) - ln_gamma(gamma + 1.0) - ln_gamma(m + 1.0)).exp();
                row.push(bp / r1);
                srow.push(sigma_nk(idx, gamma)?);
            }
            consts.push(row);
            sigmas.push(srow);
        }
        Ok(Self { gamma, n_max, consts, sigmas })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn sigma(&self, n: usize, k: usize) -> f64 {
        self.sigmas[n][k]
    }

    /// `Zₙₖ^γ(w)` on the Euclidean disk.
    pub fn eval(&self, n: usize, k: usize, w: DiskPoint) -> Complex64 {
        let l = n as i64 - 2 * k as i64;
        let m = k.min(n - k);
        let y = 2.0 * w.abs2() - 1.0;
        let radial = jacobi_standard(m, self.gamma, l.unsigned_abs() as f64, y);
        let z = if l >= 0 { w.z() } else { w.z().conj() };
        self.consts[n][k] * radial * z.powu(l.unsigned_abs() as u32)
    }

    /// `Ẑₙₖ^γ = Zₙₖ^γ/σₙₖ^γ`, unit norm in `L²(D_E, d^γ dV_E)`.
    pub fn eval_normalized(&self, n: usize, k: usize, w: DiskPoint) -> Complex64 {
        self.eval(n, k, w) / self.sigmas[n][k]
    }

    pub fn checked(&self, idx: BasisIndex) -> Result<(usize, usize)> {
        idx.require_in_band()?;
        if idx.n > self.n_max {
            return Err(Error::GridTooCoarse(format!("degree {} exceeds basis limit {}", idx.n, self.n_max)));
        }
        Ok((idx.n, idx.k as usize))
    }
}

/// `Zₙₖ^γ(w)` without caching.
pub fn zernike(idx: BasisIndex, gamma: f64, w: DiskPoint) -> Result<Complex64> {
    idx.require_in_band()?;
    let basis = ZernikeBasis::new(gamma, idx.n)?;
    Ok(basis.eval(idx.n, idx.k as usize, w))
}

/// The Euclidean operator `L_γ` applied by centred 5-point differences in
/// polar coordinates `(ρ, ω)`.
pub fn apply_l_gamma_euclid<F>(f: F, gamma: f64, w: DiskPoint, h: f64) -> Result<Complex64>
where
    F: Fn(DiskPoint) -> Complex64,
{
    let rho = w.abs();
    let omega = w.omega();
    if rho - 2.0 * h <= 0.0 || rho + 2.0 * h >= 1.0 {
        return Err(Error::StencilOutsideDomain(rho));
    }
    let at = |r: f64, o: f64| f(DiskPoint::from_polar(r, o));
    let (d1r, d2r) = fd5(|r| at(r, omega), rho, h);
    let (_, d2o) = fd5(|o| at(rho, o), omega, h);
    let r2 = rho * rho;
    Ok(-(1.0 - r2) * d2r - ((1.0 - r2) / rho - 2.0 * (gamma + 1.0) * rho) * d1r - d2o / r2
        + at(rho, omega) * (1.0 + gamma).powi(2))
}

/// Centred 5-point first and second derivatives.
pub(crate) fn fd5<F: Fn(f64) -> Complex64>(f: F, x: f64, h: f64) -> (Complex64, Complex64) {
    let fm2 = f(x - 2.0 * h);
    let fm1 = f(x - h);
    let f0 = f(x);
    let fp1 = f(x + h);
    let fp2 = f(x + 2.0 * h);
    let d1 = (fm2 - fm1 * 8.0 + fp1 * 8.0 - fp2) / (12.0 * h);
    let d2 = (-fm2 + fm1 * 16.0 - f0 * 30.0 + fp1 * 16.0 - fp2) / (12.0 * h * h);
    (d1, d2)
}
