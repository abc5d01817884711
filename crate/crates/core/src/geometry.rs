//! Coordinates on the Poincaré disk and its Beltrami–Klein counterpart.
//!
//! Oriented hyperbolic geodesics are labelled horocyclically by `(beta, a)`
//! or by their vertex `(omega, s)`; Euclidean chords by fan-beam
//! coordinates `(beta, alpha)`. The map `Phi(z) = 2z/(1+|z|^2)` sends every
//! hyperbolic geodesic onto a Euclidean chord.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points with `|z| > 1 - INTERIOR_CUTOFF` are not treated as interior.
pub const INTERIOR_CUTOFF: f64 = 1e-13;
/// Tolerance for comparing angles modulo `2π`.
pub const ANGLE_TOL: f64 = 1e-12;

/// Reduces an angle to `[0, 2π)`.
pub fn normalize_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Distance between two angles on the circle.
pub fn angle_dist(a: f64, b: f64) -> f64 {
    let d = normalize_angle(a - b);
    d.min(TAU - d)
}

/// Whether two angles agree modulo `2π` within [`ANGLE_TOL`].
pub fn angles_close(a: f64, b: f64) -> bool {
    angle_dist(a, b) <= ANGLE_TOL
}

/// A point of the closed unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    pub re: f64,
    pub im: f64,
}

impl DiskPoint {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn from_polar(r: f64, omega: f64) -> Self {
        Self::from(Complex64::from_polar(r, omega))
    }

    pub fn z(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn abs2(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    /// Polar angle `omega = arg z` in `[0, 2π)`.
    pub fn omega(self) -> f64 {
        normalize_angle(self.im.atan2(self.re))
    }

    pub fn is_interior(self) -> bool {
        self.abs() <= 1.0 - INTERIOR_CUTOFF
    }

    pub fn require_interior(self) -> Result<Self> {
        if self.is_interior() {
            Ok(self)
        } else {
            Err(Error::NotInterior(self.abs()))
        }
    }
}

impl From<Complex64> for DiskPoint {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Extended real line `ℝ ∪ {±∞}` used for the horocyclic parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
    NegInf,
}

impl ExtReal {
    pub fn finite(self) -> Result<f64> {
        match self {
            ExtReal::Finite(a) if a.is_finite() => Ok(a),
            _ => Err(Error::InfiniteParameter),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(a: f64) -> Self {
        if a == f64::INFINITY {
            ExtReal::PosInf
        } else if a == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(a)
        }
    }
}

/// Oriented geodesic in horocyclic coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicHoro {
    pub beta: f64,
    pub a: ExtReal,
}

impl GeodesicHoro {
    pub fn new(beta: f64, a: f64) -> Self {
        Self { beta: normalize_angle(beta), a: ExtReal::from(a) }
    }

    pub fn mu_h(self) -> f64 {
        mu_h(self.a)
    }

    pub fn a_finite(self) -> Result<f64> {
        self.a.finite()
    }
}

/// Oriented geodesic labelled by its vertex `s e^{iω}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicVertex {
    pub omega: f64,
    pub s: f64,
}

impl GeodesicVertex {
    pub fn new(omega: f64, s: f64) -> Self {
        Self { omega: normalize_angle(omega), s }
    }
}

/// Euclidean fan-beam coordinates: boundary point `e^{iβ}` and direction
/// `e^{i(β+π+α)}`. Inward-pointing vectors have `|α| ≤ π/2`; the full
/// boundary of the unit circle bundle uses `α ∈ [−π/2, 3π/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanBeamCoord {
    pub beta: f64,
    pub alpha: f64,
}

impl FanBeamCoord {
    pub fn new(beta: f64, alpha: f64) -> Self {
        let alpha = (alpha + FRAC_PI_2).rem_euclid(TAU) - FRAC_PI_2;
        Self { beta: normalize_angle(beta), alpha }
    }

    /// `μ = cos α`.
    pub fn mu(self) -> f64 {
        self.alpha.cos()
    }

    pub fn is_incoming(self) -> bool {
        self.alpha.abs() <= FRAC_PI_2
    }
}

/// A unit tangent vector `(z, θ)`, with `θ` the direction of the Euclidean
/// velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitTangent {
    pub z: DiskPoint,
    pub theta: f64,
}

/// The two sheets of `Γ = Γ₊ ∪ Γ₋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sheet {
    Plus,
    Minus,
}

impl Sheet {
    pub fn sign(self) -> f64 {
        match self {
            Sheet::Plus => 1.0,
            Sheet::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sheet::Plus => Sheet::Minus,
            Sheet::Minus => Sheet::Plus,
        }
    }
}

/// A point `(β, a, λ)` of `Γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPointGamma {
    pub beta: f64,
    pub a: f64,
    pub lambda: Sheet,
}

impl BoundaryPointGamma {
    pub fn new(beta: f64, a: f64, lambda: Sheet) -> Self {
        Self { beta: normalize_angle(beta), a, lambda }
    }
}

/// Boundary defining function `x(z) = (1−|z|²)/(1+|z|²)`.
pub fn bdf_x(z: DiskPoint) -> f64 {
    let r2 = z.abs2();
    ((1.0 - r2) / (1.0 + r2)).max(0.0)
}

/// Euclidean boundary defining function `d(w) = 1 − |w|²`.
pub fn bdf_d(w: DiskPoint) -> f64 {
    (1.0 - w.abs2()).max(0.0)
}

/// `μ_h(a) = (1+a²)^{−1/2}`, zero at `a = ±∞`.
pub fn mu_h(a: ExtReal) -> f64 {
    match a {
        ExtReal::Finite(a) => mu_h_finite(a),
        _ => 0.0,
    }
}

pub fn mu_h_finite(a: f64) -> f64 {
    1.0 / a.hypot(1.0)
}

/// Point, Euclidean velocity and `1 − |z|²` along a horocyclic geodesic.
#[derive(Debug, Clone, Copy)]
pub struct HoroState {
    pub z: Complex64,
    pub velocity: Complex64,
    /// `1 − |z|²`, evaluated without cancellation near the boundary.
    pub one_minus_r2: f64,
}

/// Full state of `γ_{β,a}` at time `t` (unit hyperbolic speed).
pub fn horo_state(g: GeodesicHoro, t: f64) -> Result<HoroState> {
    let a = g.a_finite()?;
    let x = (0.5 * t).tanh();
    let rot = Complex64::from_polar(1.0, g.beta);
    let ia = Complex64::new(0.0, a);
    let num = (Complex64::new(2.0, a)) * x + ia;
    let den = ia * x + Complex64::new(-2.0, a);
    let z = rot * num / den;
    let sech = 1.0 / (0.5 * t).cosh();
    // d/dt of the Möbius expression: the determinant is −4 and dX/dt = sech²(t/2)/2.
    let velocity = rot * (-2.0 * sech * sech) / (den * den);
    let e = (-t).exp() + 2.0 + (1.0 + a * a) * t.exp();
    Ok(HoroState { z, velocity, one_minus_r2: 4.0 / e })
}

/// `γ_{β,a}(t)` together with the velocity angle `θ`.
pub fn geodesic_horo(g: GeodesicHoro, t: f64) -> Result<(DiskPoint, f64)> {
    let st = horo_state(g, t)?;
    Ok((st.z.into(), normalize_angle(st.velocity.arg())))
}

/// Unit tangent vector of `γ_{β,a}` at time `t`.
pub fn horo_tangent(g: GeodesicHoro, t: f64) -> Result<UnitTangent> {
    let (z, theta) = geodesic_horo(g, t)?;
    Ok(UnitTangent { z, theta })
}

/// Endpoints `γ(−∞) = e^{iβ}` and `γ(+∞) = e^{i(β+π+2 atan a)}`.
pub fn horo_endpoints(g: GeodesicHoro) -> Result<(f64, f64)> {
    let a = g.a_finite()?;
    Ok((g.beta, normalize_angle(g.beta + PI + 2.0 * a.atan())))
}

/// `γ^v_{ω,s}(t) = e^{iω}(s + iX)/(1 + isX)`, `X = tanh(t/2)`.
pub fn geodesic_vertex(g: GeodesicVertex, t: f64) -> DiskPoint {
    let x = (0.5 * t).tanh();
    let num = Complex64::new(g.s, x);
    let den = Complex64::new(1.0, g.s * x);
    (Complex64::from_polar(1.0, g.omega) * num / den).into()
}

/// Converts horocyclic to vertex coordinates and returns the time shift
/// `t₀ = −log√(1+a²)` with `γ_{β,a}(t+t₀) = γ^v_{ω,s}(t)`.
pub fn horo_to_vertex(g: GeodesicHoro) -> Result<(GeodesicVertex, f64)> {
    let a = g.a_finite()?;
    let root = a.hypot(1.0);
    let s = -a / (root + 1.0);
    let omega = g.beta + FRAC_PI_2 - 2.0 * s.atan();
    Ok((GeodesicVertex::new(omega, s), -root.ln()))
}

/// Inverse of [`horo_to_vertex`] on coordinates.
pub fn vertex_to_horo(v: GeodesicVertex) -> GeodesicHoro {
    let s = v.s;
    GeodesicHoro::new(v.omega + 1.5 * PI + 2.0 * s.atan(), -2.0 * s / (1.0 - s * s))
}

/// Horocyclic coordinates of the geodesic through a unit tangent vector.
pub fn footprint(v: UnitTangent) -> Result<GeodesicHoro> {
    let z = v.z.require_interior()?.z();
    let rot = z * Complex64::from_polar(1.0, -v.theta);
    let beta = v.theta + PI + 2.0 * (Complex64::new(1.0, 0.0) - rot).arg();
    let a = 2.0 * rot.im / (1.0 - z.norm_sqr());
    Ok(GeodesicHoro::new(beta, a))
}

/// Scattering relation `S^H` on `Γ`.
pub fn scattering(p: BoundaryPointGamma) -> BoundaryPointGamma {
    let shift = p.lambda.sign() * 2.0 * p.a.atan();
    BoundaryPointGamma::new(p.beta + PI + shift, p.a, p.lambda.flip())
}

/// Antipodal map `A_H(β, a, λ) = (β, −a, −λ)`.
pub fn antipodal(p: BoundaryPointGamma) -> BoundaryPointGamma {
    BoundaryPointGamma::new(p.beta, -p.a, p.lambda.flip())
}

/// Orientation reversal `S_A^H(β, a) = (β + π + 2 atan a, −a)` on `G`.
pub fn scattering_antipodal(g: GeodesicHoro) -> Result<GeodesicHoro> {
    let a = g.a_finite()?;
    Ok(GeodesicHoro::new(g.beta + PI + 2.0 * a.atan(), -a))
}

/// Euclidean scattering relation `S^E(β, α) = (β + π + 2α, π − α)`.
pub fn scattering_euclid(c: FanBeamCoord) -> FanBeamCoord {
    FanBeamCoord::new(c.beta + PI + 2.0 * c.alpha, PI - c.alpha)
}

/// Euclidean orientation reversal `S_A^E(β, α) = (β + π + 2α, −α)`.
pub fn scattering_antipodal_euclid(c: FanBeamCoord) -> FanBeamCoord {
    FanBeamCoord::new(c.beta + PI + 2.0 * c.alpha, -c.alpha)
}

/// Euclidean antipodal map `(z, w) ↦ (z, −w)`.
pub fn antipodal_euclid(c: FanBeamCoord) -> FanBeamCoord {
    FanBeamCoord::new(c.beta, c.alpha + PI)
}

/// `Φ(z) = 2z/(1+|z|²)`, Poincaré disk to Beltrami–Klein disk.
pub fn phi_map(z: DiskPoint) -> DiskPoint {
    (z.z() * (2.0 / (1.0 + z.abs2()))).into()
}

/// Inverse of [`phi_map`]: `z = w/(1 + √(1−|w|²))`.
pub fn phi_inv(w: DiskPoint) -> DiskPoint {
    let d = (1.0 - w.abs2()).max(0.0);
    (w.z() / (1.0 + d.sqrt())).into()
}

/// `Ψ : Γ → ∂S D_E \ ∂₀S D_E`.
pub fn psi_hf(p: BoundaryPointGamma) -> FanBeamCoord {
    match p.lambda {
        Sheet::Plus => FanBeamCoord::new(p.beta, p.a.atan()),
        Sheet::Minus => FanBeamCoord::new(p.beta, PI - p.a.atan()),
    }
}

/// Inverse of [`psi_hf`]; glancing directions `α = ±π/2` have no preimage.
pub fn psi_hf_inv(c: FanBeamCoord) -> Result<BoundaryPointGamma> {
    let c = FanBeamCoord::new(c.beta, c.alpha);
    if (c.alpha.abs() - FRAC_PI_2).abs() < 1e-15 || (c.alpha - 1.5 * PI).abs() < 1e-15 {
        return Err(Error::InfiniteParameter);
    }
    if c.alpha < FRAC_PI_2 {
        Ok(BoundaryPointGamma::new(c.beta, c.alpha.tan(), Sheet::Plus))
    } else {
        Ok(BoundaryPointGamma::new(c.beta, (PI - c.alpha).tan(), Sheet::Minus))
    }
}

/// Euclidean chord `γ^E_{β,α}(u) = e^{i(β+α+π)}(u + i sin α)`.
pub fn geodesic_euclid(c: FanBeamCoord, u: f64) -> DiskPoint {
    (Complex64::from_polar(1.0, c.beta + c.alpha + PI) * Complex64::new(u, c.alpha.sin())).into()
}

/// Fan-beam coordinates of the Euclidean line through `w` with direction `e^{iθ}`.
pub fn footprint_euclid(w: DiskPoint, theta: f64) -> FanBeamCoord {
    let rot = w.z() * Complex64::from_polar(1.0, -theta);
    let alpha = rot.im.clamp(-1.0, 1.0).asin();
    FanBeamCoord::new(theta - PI - alpha, alpha)
}

/// Position on the Euclidean chord: `Φ(γ(t)) = γ^E_{chord}(u)`.
#[derive(Debug, Clone, Copy)]
pub struct ChordParam {
    pub chord: FanBeamCoord,
    pub u: f64,
    pub dudt: f64,
}

/// Fan-beam chord carrying `Φ(γ^v_{ω,s})`.
pub fn chord_of_vertex(v: GeodesicVertex) -> FanBeamCoord {
    let alpha = -2.0 * v.s.atan();
    FanBeamCoord::new(v.omega - FRAC_PI_2 - alpha, alpha)
}

/// Reparameterization `u(t) = cos α · tanh t` of the vertex geodesic.
pub fn reparam_u_vertex(v: GeodesicVertex, t: f64) -> ChordParam {
    let s2 = v.s * v.s;
    let cos_a = (1.0 - s2) / (1.0 + s2);
    let sech = 1.0 / t.cosh();
    ChordParam { chord: chord_of_vertex(v), u: cos_a * t.tanh(), dudt: cos_a * sech * sech }
}

/// Reparameterization `u(t) = μ_h(a) tanh(t − t₀)` of the horocyclic geodesic.
pub fn reparam_u_horo(g: GeodesicHoro, t: f64) -> Result<ChordParam> {
    let a = g.a_finite()?;
    let mu = mu_h_finite(a);
    let tau = t - mu.ln();
    let sech = 1.0 / tau.cosh();
    Ok(ChordParam { chord: FanBeamCoord::new(g.beta, a.atan()), u: mu * tau.tanh(), dudt: mu * sech * sech })
}

/// `((C² − x̃²)/2C)² · ω̇ / x̃²` along `γ_{β,a}` with `x̃ = C(1−|z|)/(1+|z|)`.
pub fn cosphere_momentum(g: GeodesicHoro, t: f64, c: f64) -> Result<f64> {
    let st = horo_state(g, t)?;
    let r = st.z.norm();
    if r == 0.0 {
        return Ok(0.0);
    }
    let one_minus_r = st.one_minus_r2 / (1.0 + r);
    let xt = c * one_minus_r / (1.0 + r);
    let omega_dot = (st.velocity / st.z).im;
    let pref = (c * c - xt * xt) / (2.0 * c);
    Ok(pref * pref * omega_dot / (xt * xt))
}

/// Logarithmic rate `ẋ̃/x̃` along `γ_{β,a}`; independent of `C`.
pub fn cosphere_log_rate(g: GeodesicHoro, t: f64) -> Result<f64> {
    let st = horo_state(g, t)?;
    let r = st.z.norm();
    let r_dot = (st.velocity * st.z.conj()).re / r;
    Ok(-2.0 * r_dot / st.one_minus_r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c_close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn bdf_examples() {
        assert_eq!(bdf_x(DiskPoint::new(0.0, 0.0)), 1.0);
        assert_eq!(bdf_x(DiskPoint::new(1.0, 0.0)), 0.0);
        assert_abs_diff_eq!(bdf_x(DiskPoint::new(0.5, 0.0)), 0.6, epsilon = 1e-15);
    }

    #[test]
    fn mu_h_examples() {
        assert_eq!(mu_h(ExtReal::Finite(0.0)), 1.0);
        assert_eq!(mu_h(ExtReal::PosInf), 0.0);
        assert_eq!(mu_h(ExtReal::NegInf), 0.0);
        assert_abs_diff_eq!(mu_h(ExtReal::Finite(1.0)), 1.0 / 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn infinite_a_rejected() {
        let g = GeodesicHoro { beta: 0.0, a: ExtReal::PosInf };
        assert_eq!(geodesic_horo(g, 0.0).unwrap_err(), Error::InfiniteParameter);
        assert!(horo_to_vertex(g).is_err());
        assert!(scattering_antipodal(g).is_err());
    }

    #[test]
    fn horo_center_and_endpoints() {
        for beta in [0.0, 1.0, 5.5] {
            let (z, theta) = geodesic_horo(GeodesicHoro::new(beta, 0.0), 0.0).unwrap();
            assert!(z.abs() < 1e-15);
            assert!(angles_close(theta, beta + PI));
        }
        let g = GeodesicHoro::new(0.7, 1.3);
        let (start, end) = horo_endpoints(g).unwrap();
        let (zm, _) = geodesic_horo(g, -60.0).unwrap();
        let (zp, _) = geodesic_horo(g, 60.0).unwrap();
        assert!(c_close(zm.z(), Complex64::from_polar(1.0, start), 1e-12));
        assert!(c_close(zp.z(), Complex64::from_polar(1.0, end), 1e-12));
    }

    #[test]
    fn horo_vertex_basic() {
        let (v, t0) = horo_to_vertex(GeodesicHoro::new(0.4, 0.0)).unwrap();
        assert_eq!(v.s, 0.0);
        assert!(angles_close(v.omega, 0.4 + FRAC_PI_2));
        assert_eq!(t0, 0.0);
        let h = vertex_to_horo(GeodesicVertex::new(0.3, 0.0));
        assert!(angles_close(h.beta, 0.3 + 1.5 * PI));
        assert_eq!(h.a, ExtReal::Finite(0.0));
        let h = vertex_to_horo(GeodesicVertex::new(0.3, 0.5));
        assert_abs_diff_eq!(h.a_finite().unwrap(), -4.0 / 3.0, epsilon = 1e-15);
        let p = geodesic_vertex(GeodesicVertex::new(1.1, 0.4), 0.0);
        assert!(c_close(p.z(), Complex64::from_polar(0.4, 1.1), 1e-15));
    }

    #[test]
    fn footprint_at_origin() {
        let g = footprint(UnitTangent { z: DiskPoint::new(0.0, 0.0), theta: 0.3 }).unwrap();
        assert!(angles_close(g.beta, 0.3 + PI));
        assert_eq!(g.a, ExtReal::Finite(0.0));
        // seam: theta + pi just below 2π wraps into [0, 2π)
        let g = footprint(UnitTangent { z: DiskPoint::new(0.0, 0.0), theta: PI - 1e-3 }).unwrap();
        assert!(g.beta >= 0.0 && g.beta < TAU);
        assert!(angles_close(g.beta, TAU - 1e-3));
        assert!(footprint(UnitTangent { z: DiskPoint::new(1.0, 0.0), theta: 0.0 }).is_err());
    }

    #[test]
    fn psi_examples() {
        let p = psi_hf(BoundaryPointGamma::new(0.2, 0.0, Sheet::Plus));
        assert_eq!((p.beta, p.alpha), (0.2, 0.0));
        let p = psi_hf(BoundaryPointGamma::new(0.2, 0.0, Sheet::Minus));
        assert_abs_diff_eq!(p.alpha, PI, epsilon = 1e-15);
    }

    #[test]
    fn scattering_antipodal_zero() {
        let g = scattering_antipodal(GeodesicHoro::new(0.5, 0.0)).unwrap();
        assert!(angles_close(g.beta, 0.5 + PI));
        assert_eq!(g.a, ExtReal::Finite(-0.0));
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_map(DiskPoint::new(0.0, 0.0)), DiskPoint::new(0.0, 0.0));
        let b = DiskPoint::from_polar(1.0, 0.9);
        assert!(c_close(phi_map(b).z(), b.z(), 1e-15));
    }

    #[test]
    fn reparam_s_zero() {
        let c = reparam_u_vertex(GeodesicVertex::new(0.2, 0.0), 0.8);
        assert_eq!(c.chord.alpha, 0.0);
        assert_abs_diff_eq!(c.u, 0.8f64.tanh(), epsilon = 1e-15);
    }

    #[test]
    fn cosphere_examples() {
        for t in [-3.0, -0.5, 0.0, 2.0] {
            assert_abs_diff_eq!(cosphere_momentum(GeodesicHoro::new(0.3, 0.0), t, 1.0).unwrap(), 0.0, epsilon = 1e-14);
        }
        for t in [-3.0, 0.0, 3.0] {
            for c in [1.0, 2.0] {
                let m = cosphere_momentum(GeodesicHoro::new(1.0, 2.0), t, c).unwrap();
                assert_abs_diff_eq!(m, -2.0, epsilon = 1e-10);
            }
        }
        let g = GeodesicHoro::new(2.0, 0.7);
        assert_abs_diff_eq!(cosphere_log_rate(g, -30.0).unwrap(), 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(cosphere_log_rate(g, 30.0).unwrap(), -1.0, epsilon = 1e-6);
    }

    #[test]
    fn one_minus_r2_matches_direct() {
        let g = GeodesicHoro::new(1.0, -0.8);
        for t in [-4.0, -1.0, 0.0, 0.5, 3.0] {
            let st = horo_state(g, t).unwrap();
            assert_abs_diff_eq!(st.one_minus_r2, 1.0 - st.z.norm_sqr(), epsilon = 1e-14);
        }
    }

    #[test]
    fn velocity_matches_finite_difference() {
        let g = GeodesicHoro::new(0.3, 1.7);
        let h = 1e-5;
        for t in [-2.0, 0.0, 1.5] {
            let st = horo_state(g, t).unwrap();
            let fd = (horo_state(g, t + h).unwrap().z - horo_state(g, t - h).unwrap().z) / (2.0 * h);
            assert!(c_close(st.velocity, fd, 1e-9));
            // unit hyperbolic speed: |ż| = (1 − |z|²)/2
            assert_abs_diff_eq!(st.velocity.norm(), 0.5 * st.one_minus_r2, epsilon = 1e-14);
        }
    }

    fn beta_s() -> impl Strategy<Value = f64> {
        0.0..TAU
    }

    proptest! {
        #[test]
        fn x_along_horo_bounded_and_closed_form(beta in beta_s(), a in -20.0f64..20.0, t in -15.0f64..15.0) {
            let g = GeodesicHoro::new(beta, a);
            let (z, _) = geodesic_horo(g, t).unwrap();
            let mu = mu_h_finite(a);
            let t0 = mu.ln();
            prop_assert!(bdf_x(z) <= mu + 1e-14);
            prop_assert!((bdf_x(z) - mu / (t - t0).cosh()).abs() < 1e-12);
        }

        #[test]
        fn vertex_x_identity(omega in beta_s(), s in -0.99f64..0.99, t in -10.0f64..10.0) {
            let z = geodesic_vertex(GeodesicVertex::new(omega, s), t);
            let expect = (1.0 - s * s) / (1.0 + s * s) / t.cosh();
            prop_assert!((bdf_x(z) - expect).abs() < 1e-12);
        }

        #[test]
        fn horo_vertex_round_trip(beta in beta_s(), a in -50.0f64..50.0) {
            let g = GeodesicHoro::new(beta, a);
            let (v, _) = horo_to_vertex(g).unwrap();
            let back = vertex_to_horo(v);
            prop_assert!(angles_close(back.beta, g.beta));
            let ab = back.a_finite().unwrap();
            prop_assert!((ab - a).abs() <= 1e-12 * (1.0 + a.abs()));
        }

        #[test]
        fn horo_vertex_curves_agree(beta in beta_s(), a in -10.0f64..10.0, t in -8.0f64..8.0) {
            let g = GeodesicHoro::new(beta, a);
            let (v, t0) = horo_to_vertex(g).unwrap();
            let (zh, _) = geodesic_horo(g, t + t0).unwrap();
            let zv = geodesic_vertex(v, t);
            prop_assert!(c_close(zh.z(), zv.z(), 1e-10));
        }

        #[test]
        fn footprint_flow_invariant(beta in beta_s(), a in -10.0f64..10.0, t in -6.0f64..6.0) {
            let g = GeodesicHoro::new(beta, a);
            let back = footprint(horo_tangent(g, t).unwrap()).unwrap();
            prop_assert!(angle_dist(back.beta, g.beta) < 1e-10);
            prop_assert!((back.a_finite().unwrap() - a).abs() < 1e-10 * (1.0 + a.abs()));
        }

        #[test]
        fn involutions(beta in beta_s(), a in -30.0f64..30.0, plus in any::<bool>()) {
            let sheet = if plus { Sheet::Plus } else { Sheet::Minus };
            let p = BoundaryPointGamma::new(beta, a, sheet);
            let ss = scattering(scattering(p));
            prop_assert!(angles_close(ss.beta, p.beta) && ss.a == p.a && ss.lambda == p.lambda);
            let aa = antipodal(antipodal(p));
            prop_assert!(angles_close(aa.beta, p.beta) && aa.a == p.a && aa.lambda == p.lambda);
            let sa = scattering(antipodal(p));
            let as_ = antipodal(scattering(p));
            prop_assert!(angles_close(sa.beta, as_.beta) && sa.a == as_.a && sa.lambda == as_.lambda);
            if sheet == Sheet::Plus {
                let g = scattering_antipodal(GeodesicHoro::new(beta, a)).unwrap();
                prop_assert!(angles_close(g.beta, sa.beta) && g.a_finite().unwrap() == sa.a);
                let gg = scattering_antipodal(g).unwrap();
                prop_assert!(angles_close(gg.beta, beta) && gg.a_finite().unwrap() == a);
            }
        }

        #[test]
        fn psi_intertwines_scattering(beta in beta_s(), a in -30.0f64..30.0, plus in any::<bool>()) {
            let sheet = if plus { Sheet::Plus } else { Sheet::Minus };
            let p = BoundaryPointGamma::new(beta, a, sheet);
            let lhs = psi_hf(scattering(p));
            let rhs = scattering_euclid(psi_hf(p));
            prop_assert!(angles_close(lhs.beta, rhs.beta));
            prop_assert!(angles_close(lhs.alpha, rhs.alpha));
            let back = psi_hf_inv(psi_hf(p)).unwrap();
            prop_assert!(angles_close(back.beta, p.beta) && back.lambda == p.lambda);
            prop_assert!((back.a - a).abs() <= 1e-12 * (1.0 + a * a));
        }

        #[test]
        fn phi_pullback_of_d(re in -0.7f64..0.7, im in -0.7f64..0.7) {
            let z = DiskPoint::new(re, im);
            let x = bdf_x(z);
            prop_assert!((bdf_d(phi_map(z)) - x * x).abs() < 1e-14);
            let back = phi_inv(phi_map(z));
            prop_assert!(c_close(back.z(), z.z(), 1e-12));
        }

        #[test]
        fn projective_equivalence(omega in beta_s(), s in -0.95f64..0.95, t in -6.0f64..6.0) {
            let v = GeodesicVertex::new(omega, s);
            let cp = reparam_u_vertex(v, t);
            let lhs = phi_map(geodesic_vertex(v, t));
            let rhs = geodesic_euclid(cp.chord, cp.u);
            prop_assert!(c_close(lhs.z(), rhs.z(), 1e-12));
            let s2 = s * s;
            let x = bdf_x(geodesic_vertex(v, t));
            prop_assert!((cp.dudt - (1.0 + s2) / (1.0 - s2) * x * x).abs() < 1e-12);
            let h = 1e-5;
            let fd = (reparam_u_vertex(v, t + h).u - reparam_u_vertex(v, t - h).u) / (2.0 * h);
            prop_assert!((fd - cp.dudt).abs() < 1e-8);
            prop_assert!(angles_close(omega + FRAC_PI_2, cp.chord.beta + cp.chord.alpha + PI));
        }

        #[test]
        fn projective_equivalence_horo(beta in beta_s(), a in -10.0f64..10.0, t in -6.0f64..6.0) {
            let g = GeodesicHoro::new(beta, a);
            let cp = reparam_u_horo(g, t).unwrap();
            let (z, _) = geodesic_horo(g, t).unwrap();
            prop_assert!(c_close(phi_map(z).z(), geodesic_euclid(cp.chord, cp.u).z(), 1e-12));
        }

        #[test]
        fn euclid_footprint_inverts_chord(beta in beta_s(), alpha in -1.5f64..1.5, u in -0.9f64..0.9) {
            let c = FanBeamCoord::new(beta, alpha);
            let w = geodesic_euclid(c, u * alpha.cos());
            let back = footprint_euclid(w, c.beta + c.alpha + PI);
            prop_assert!(angles_close(back.beta, c.beta));
            prop_assert!((back.alpha - c.alpha).abs() < 1e-10);
        }
    }
}
