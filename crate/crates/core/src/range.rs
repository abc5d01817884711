//! Range characterization: extension operators on `Γ = Γ₊ ∪ Γ₋`, the
//! fiberwise odd Hilbert transform, the boundary operators `C₋^H` and
//! `P₋^H`, and the hyperbolic moment conditions.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{check_gamma, Error, Result};
use crate::geometry::{
    mu_h_finite, psi_hf, scattering, vertex_to_horo, BoundaryPointGamma, GeodesicHoro, GeodesicVertex, Sheet,
};
use crate::grid::DataGrid;
use crate::quadrature::{de_line_integral, gauss_jacobi_cached, gauss_legendre, Estimate};
use crate::specfun::{psi_phi_zero, sigma_sq, BasisIndex, JacobiFamily, ZeroBasis};
use crate::spectral::{analyze_data, CoeffTable, DataInterpolant, InterpMode};

/// A function on `Γ₊ ≅ G`.
pub type DataFn = Arc<dyn Fn(GeodesicHoro) -> Complex64 + Send + Sync>;

pub fn data_fn<F>(f: F) -> DataFn
where
    F: Fn(GeodesicHoro) -> Complex64 + Send + Sync + 'static,
{
    Arc::new(f)
}

/// A function on both sheets of `Γ`.
#[derive(Clone)]
pub struct GammaFunction {
    f: Arc<dyn Fn(BoundaryPointGamma) -> Complex64 + Send + Sync>,
}

impl std::fmt::Debug for GammaFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("GammaFunction")
    }
}

impl GammaFunction {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(BoundaryPointGamma) -> Complex64 + Send + Sync + 'static,
    {
        Self { f: Arc::new(f) }
    }

    #[inline]
    pub fn eval(&self, p: BoundaryPointGamma) -> Complex64 {
        (self.f)(p)
    }

    /// `u₋ = (u − A_H^* u)/2` at `p`.
    pub fn odd_part_at(&self, p: BoundaryPointGamma) -> Complex64 {
        (self.eval(p) - self.eval(antipode(p))) * 0.5
    }
}

/// `A_H(β, a, ±) = (β, −a, ∓)`.
pub fn antipode(p: BoundaryPointGamma) -> BoundaryPointGamma {
    BoundaryPointGamma { beta: p.beta, a: -p.a, lambda: p.lambda.flip() }
}

fn on_plus(g: GeodesicHoro) -> Result<BoundaryPointGamma> {
    Ok(BoundaryPointGamma { beta: g.beta, a: g.a_finite()?, lambda: Sheet::Plus })
}

/// Which extension `A_±^H` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Extension {
    Plus,
    Minus,
}

impl Extension {
    fn sign(self) -> f64 {
        match self {
            Extension::Plus => 1.0,
            Extension::Minus => -1.0,
        }
    }
}

/// `A_±^H u = u` on `Γ₊` and `±u∘S^H` on `Γ₋`.
pub fn extend_a(u: DataFn, ext: Extension) -> GammaFunction {
    let sign = ext.sign();
    GammaFunction::new(move |p| match p.lambda {
        Sheet::Plus => u(GeodesicHoro::new(p.beta, p.a)),
        Sheet::Minus => {
            let q = scattering(p);
            u(GeodesicHoro::new(q.beta, q.a)) * sign
        }
    })
}

/// `(A_±^H)^* U = U ± (S^H)^* U` restricted to `Γ₊`.
pub fn extend_a_adjoint(u: GammaFunction, ext: Extension) -> DataFn {
    let sign = ext.sign();
    data_fn(move |g| match on_plus(g) {
        Ok(p) => u.eval(p) + u.eval(scattering(p)) * sign,
        Err(_) => Complex64::new(0.0, 0.0),
    })
}

/// Evaluation scheme for `H₋`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HilbertMode {
    /// Conjugate to the Euclidean fiber and apply `−i·sgn(m)` to odd
    /// harmonics, using `fiber_nodes` equispaced samples (a power of two).
    Spectral { fiber_nodes: usize },
    /// Principal value in `a` with `a′ = a ± tan δ` paired symmetrically,
    /// Gauss–Legendre in `δ ∈ (0, π/2)`.
    Pv { nodes: usize },
}

impl HilbertMode {
    pub fn spectral() -> Self {
        HilbertMode::Spectral { fiber_nodes: 128 }
    }

    pub fn pv() -> Self {
        HilbertMode::Pv { nodes: 160 }
    }
}

impl Default for HilbertMode {
    fn default() -> Self {
        Self::spectral()
    }
}

/// The function `Ψ^{−*}(|μ_h|^{−1} U)` on the Euclidean fiber over `e^{iβ}`.
fn fiber_value(u: &GammaFunction, beta: f64, alpha: f64) -> Complex64 {
    let alpha = (alpha + FRAC_PI_2).rem_euclid(TAU) - FRAC_PI_2;
    let c = alpha.cos();
    if c.abs() < 1e-300 {
        return Complex64::new(0.0, 0.0);
    }
    let t = alpha.tan();
    let p = if alpha < FRAC_PI_2 {
        BoundaryPointGamma { beta, a: t, lambda: Sheet::Plus }
    } else {
        BoundaryPointGamma { beta, a: -t, lambda: Sheet::Minus }
    };
    u.eval(p) / c.abs()
}

fn hilbert_spectral(u: &GammaFunction, p: BoundaryPointGamma, m: usize) -> Result<Estimate> {
    if m < 8 || !m.is_power_of_two() {
        return Err(Error::InvalidQuadSpec(format!("fiber node count {m} must be a power of two >= 8")));
    }
    let alpha0 = psi_hf(p).alpha;
    let h = TAU / m as f64;
    let mut buf: Vec<Complex64> = (0..m).map(|j| fiber_value(u, p.beta, alpha0 + j as f64 * h)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    // Evaluate Σ −i sgn(q) c_q at the first node, odd q only.
    let mut value = Complex64::new(0.0, 0.0);
    let mut tail = 0.0;
    for (j, c) in buf.iter().enumerate() {
        let q = if j <= m / 2 { j as i64 } else { j as i64 - m as i64 };
        if q % 2 == 0 {
            continue;
        }
        value += c * Complex64::new(0.0, -(q.signum() as f64));
        if q.unsigned_abs() as usize > m / 4 {
            tail += c.norm();
        }
    }
    let scale = mu_h_finite(p.a) / m as f64;
    Ok(Estimate { value: value * scale, error: tail * scale })
}

fn hilbert_pv(u: &GammaFunction, p: BoundaryPointGamma, nodes: usize) -> Result<Estimate> {
    let integral = |n: usize| -> Result<Complex64> {
        let rule = gauss_legendre(n)?;
        Ok(rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| {
                let delta = FRAC_PI_2 * 0.5 * (x + 1.0);
                let t = delta.tan();
                let at = |a: f64| u.odd_part_at(BoundaryPointGamma { beta: p.beta, a, lambda: p.lambda });
                (at(p.a + t) - at(p.a - t)) * (w * FRAC_PI_2 * 0.5 / (2.0 * delta).sin())
            })
            .sum::<Complex64>())
    };
    let fine = integral(nodes)?;
    let coarse = integral(nodes / 2)?;
    let scale = -2.0 * p.lambda.sign() / PI;
    Ok(Estimate { value: fine * scale, error: (fine - coarse).norm() * scale.abs() })
}

/// `H₋U(β, a, ±) = ±(1/π) p.v.∫ u₋(β, a′, ±)/(a − a′) da′` at one point.
pub fn hilbert_minus_at(u: &GammaFunction, p: BoundaryPointGamma, mode: HilbertMode) -> Result<Estimate> {
    if !p.a.is_finite() {
        return Err(Error::InfiniteParameter);
    }
    match mode {
        HilbertMode::Spectral { fiber_nodes } => hilbert_spectral(u, p, fiber_nodes),
        HilbertMode::Pv { nodes } => hilbert_pv(u, p, nodes.max(8)),
    }
}

/// `H₋U` as a lazily evaluated function on `Γ`.
pub fn hilbert_minus(u: GammaFunction, mode: HilbertMode) -> GammaFunction {
    GammaFunction::new(move |p| {
        hilbert_minus_at(&u, p, mode).map(|e| e.value).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    })
}

/// `C₋^H u = ½ (A₋^H)^* H₋ A₋^H u` at `g`.
pub fn c_minus_h_at(u: &DataFn, g: GeodesicHoro, mode: HilbertMode) -> Result<Estimate> {
    boundary_op_at(u, g, Extension::Minus, 0.5, mode)
}

/// `P₋^H w = (A₋^H)^* H₋ A₊^H w` at `g`.
pub fn p_minus_h_at(w: &DataFn, g: GeodesicHoro, mode: HilbertMode) -> Result<Estimate> {
    boundary_op_at(w, g, Extension::Plus, 1.0, mode)
}

fn boundary_op_at(u: &DataFn, g: GeodesicHoro, ext: Extension, factor: f64, mode: HilbertMode) -> Result<Estimate> {
    let p = on_plus(g)?;
    let ext_u = extend_a(u.clone(), ext);
    let h1 = hilbert_minus_at(&ext_u, p, mode)?;
    let h2 = hilbert_minus_at(&ext_u, scattering(p), mode)?;
    Ok(Estimate { value: (h1.value - h2.value) * factor, error: (h1.error + h2.error) * factor })
}

pub fn c_minus_h(u: DataFn, mode: HilbertMode) -> DataFn {
    data_fn(move |g| c_minus_h_at(&u, g, mode).map(|e| e.value).unwrap_or(Complex64::new(f64::NAN, f64::NAN)))
}

pub fn p_minus_h(w: DataFn, mode: HilbertMode) -> DataFn {
    data_fn(move |g| p_minus_h_at(&w, g, mode).map(|e| e.value).unwrap_or(Complex64::new(f64::NAN, f64::NAN)))
}

/// `ψₙₖ^H, φₙₖ^H = μ_h Ψ^*ψₙₖ, μ_h Ψ^*φₙₖ` on `Γ₊`, built from the
/// unweighted Euclidean boundary bases.
pub fn zero_basis_h(idx: BasisIndex, which: ZeroBasis, g: GeodesicHoro) -> Complex64 {
    match g.a.finite() {
        Ok(a) => psi_phi_zero(idx, which, g.beta, a.atan()) * mu_h_finite(a),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

/// `C₋^H u` sampled on the nodes of a data grid, with `u` interpolated in class mode.
pub fn c_minus_grid(u: &DataGrid, mode: HilbertMode) -> Result<DataGrid> {
    let it = Arc::new(DataInterpolant::new(u, InterpMode::Class));
    let f: DataFn = data_fn(move |g| it.eval(g));
    let na = u.layout.n_alpha;
    let mut out = u.clone();
    out.samples = (0..u.samples.len())
        .into_par_iter()
        .map(|p| c_minus_h_at(&f, u.node(p / na, p % na), mode).map(|e| e.value))
        .collect::<Result<_>>()?;
    Ok(out)
}

/// Polynomial family used in the moment integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MomentFamily {
    /// `pₘ^γ`, for which `2π Mₘₖ` equals the data coefficient `uₘₖ`.
    Jacobi,
    /// `(−x)^m`.
    Monomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSpec {
    /// Gauss–Jacobi nodes in `s` for the weight `(1−s²)^{2γ+2}`.
    pub n_s: usize,
    /// Trapezoid nodes in `ω`; zero selects `4(M + 9)`.
    pub n_omega: usize,
    /// Out-of-band window beyond the degree, as for data tables.
    pub k_extra: i64,
    /// Homogeneity tolerance relative to the largest `|Mₘₖ|`.
    pub tol: f64,
    pub family: MomentFamily,
}

impl Default for MomentSpec {
    fn default() -> Self {
        Self { n_s: 64, n_omega: 0, k_extra: 8, tol: 1e-6, family: MomentFamily::Jacobi }
    }
}

/// Fourier coefficients of the moment functions `Mₘ(ω)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentReport {
    pub gamma: f64,
    pub max_degree: usize,
    pub family: MomentFamily,
    pub coeffs: CoeffTable,
    /// Per degree: is `Mₘ` a homogeneous trigonometric polynomial of degree `m`?
    pub homogeneous: Vec<bool>,
    /// Per degree: largest out-of-band `|Mₘₖ|`.
    pub residuals: Vec<f64>,
    /// Largest `|Mₘₖ|`.
    pub scale: f64,
    pub verdict: bool,
    pub offending: Vec<BasisIndex>,
}

/// `u^v(ω, s) = u(ω + 3π/2 + 2 atan s, −2s/(1−s²))`.
pub fn vertex_pullback(u: &DataFn, omega: f64, s: f64) -> Complex64 {
    u(vertex_to_horo(GeodesicVertex { omega, s }))
}

struct SRule {
    nodes: Vec<f64>,
    /// Weight divided by `(1−s²)^{2γ+2}` and multiplied by `2/(1+s²)`.
    weights: Vec<f64>,
}

fn s_rule(gamma: f64, n: usize) -> Result<SRule> {
    let e = 2.0 * gamma + 2.0;
    let r = gauss_jacobi_cached(n, e, e)?;
    Ok(SRule {
        nodes: r.nodes.clone(),
        weights: r.nodes.iter().zip(&r.weights).map(|(s, w)| w * 2.0 / (1.0 + s * s)).collect(),
    })
}

fn family_values(family: MomentFamily, gamma: f64, max_degree: usize, x: f64) -> Result<Vec<f64>> {
    Ok(match family {
        MomentFamily::Jacobi => JacobiFamily::new(gamma, max_degree)?.eval_all(x),
        MomentFamily::Monomial => (0..=max_degree).map(|m| (-x).powi(m as i32)).collect(),
    })
}

/// `∫₋₁¹ pₘ(−2s/(1+s²)) u^v(ω, s) 2ds/(1+s²)`, assuming `u` decays like `μ_h^{2γ+2}`.
pub fn vertex_moment(
    u: &DataFn,
    gamma: f64,
    m: usize,
    omega: f64,
    family: MomentFamily,
    n_s: usize,
) -> Result<Complex64> {
    check_gamma(gamma)?;
    let rule = s_rule(gamma, n_s)?;
    let e = 2.0 * gamma + 2.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
        let x = -2.0 * s / (1.0 + s * s);
        let p = family_values(family, gamma, m, x)?[m];
        acc += vertex_pullback(u, omega, s) * (w * p / (1.0 - s * s).powf(e));
    }
    Ok(acc)
}

/// `∫_ℝ tanh^m(r)/cosh(r) · u^v(ω, tanh(r/2)) dr`, the moment in geodesic
/// distance from the origin.
pub fn bct_moment(u: &DataFn, m: usize, omega: f64, level: u32) -> Estimate {
    de_line_integral(
        |r| {
            let w = r.tanh().powi(m as i32) / r.cosh();
            if w == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            vertex_pullback(u, omega, (0.5 * r).tanh()) * w
        },
        0.0,
        1.0,
        level,
    )
}

/// Moment functions `Mₘ(ω)` for `m ≤ max_degree` and their Fourier
/// coefficients `Mₘ(ω) = Σₖ Mₘₖ e^{i(m−2k)ω}`.
pub fn moment_coeffs(u: &DataFn, gamma: f64, max_degree: usize, spec: &MomentSpec) -> Result<MomentReport> {
    check_gamma(gamma)?;
    let n_omega = if spec.n_omega == 0 { 4 * (max_degree + 9) } else { spec.n_omega };
    if n_omega < 4 * (max_degree + 1) {
        return Err(Error::Aliasing { n_beta: n_omega, required: 4 * (max_degree + 1), band: max_degree });
    }
    if spec.n_s < max_degree + 1 {
        return Err(Error::GridTooCoarse(format!("{} s-nodes for degree {max_degree}", spec.n_s)));
    }
    let k_max =
        (max_degree as i64 + spec.k_extra).min((n_omega as i64 - 1 - max_degree as i64) / 2).max(max_degree as i64);
    let rule = s_rule(gamma, spec.n_s)?;
    let e = 2.0 * gamma + 2.0;
    let pvals: Vec<Vec<f64>> = rule
        .nodes
        .iter()
        .map(|&s| family_values(spec.family, gamma, max_degree, -2.0 * s / (1.0 + s * s)))
        .collect::<Result<_>>()?;
    // moments[j][m] = Mₘ(ω_j)
    let moments: Vec<Vec<Complex64>> = (0..n_omega)
        .into_par_iter()
        .map(|j| {
            let omega = TAU * j as f64 / n_omega as f64;
            let mut row = vec![Complex64::new(0.0, 0.0); max_degree + 1];
            for (q, (&s, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
                let v = vertex_pullback(u, omega, s) * (w / (1.0 - s * s).powf(e));
                for (m, r) in row.iter_mut().enumerate() {
                    *r += v * pvals[q][m];
                }
            }
            row
        })
        .collect();
    let mut coeffs = CoeffTable::new_data(gamma, max_degree, k_max)?;
    for m in 0..=max_degree {
        for k in coeffs.k_range(m) {
            let l = m as i64 - 2 * k;
            let c: Complex64 = moments
                .iter()
                .enumerate()
                .map(|(j, row)| row[m] * Complex64::from_polar(1.0, -(l as f64) * TAU * j as f64 / n_omega as f64))
                .sum::<Complex64>()
                / n_omega as f64;
            coeffs.set(m, k, c)?;
        }
    }
    let scale = coeffs.max_abs();
    let thresh = spec.tol * scale.max(f64::MIN_POSITIVE);
    let mut residuals = Vec::with_capacity(max_degree + 1);
    let mut homogeneous = Vec::with_capacity(max_degree + 1);
    let mut offending = Vec::new();
    for m in 0..=max_degree {
        let mut worst = 0.0f64;
        for k in coeffs.k_range(m) {
            let idx = BasisIndex::new(m, k);
            if idx.in_band() {
                continue;
            }
            let v = coeffs.get(m, k).norm();
            worst = worst.max(v);
            if v > thresh {
                offending.push(idx);
            }
        }
        residuals.push(worst);
        homogeneous.push(worst <= thresh);
    }
    let verdict = homogeneous.iter().all(|&h| h);
    Ok(MomentReport {
        gamma,
        max_degree,
        family: spec.family,
        coeffs,
        homogeneous,
        residuals,
        scale,
        verdict,
        offending,
    })
}

/// Settings for [`range_test`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeSpec {
    pub band: usize,
    /// Detection tolerance relative to the largest in-band coefficient.
    pub tol: f64,
    /// Largest admissible share of the weighted sum carried by the top
    /// quarter of degrees.
    pub decay_tol: f64,
    pub moments: MomentSpec,
    pub hilbert: HilbertMode,
}

impl RangeSpec {
    pub fn new(band: usize) -> Self {
        Self { band, tol: 1e-6, decay_tol: 1e-3, moments: MomentSpec::default(), hilbert: HilbertMode::default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionResult {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub offending: Vec<BasisIndex>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RangeReport {
    pub gamma: f64,
    pub s: f64,
    pub criteria: Vec<CriterionResult>,
    pub moments: MomentReport,
    /// `Σ_{m ≤ M} Σ_{k=0}^{m} (m+1+γ)^{2s}/σₘₖ² |Mₘₖ|²` for each `M`.
    pub partial_sums: Vec<f64>,
    pub all_passed: bool,
}

/// Runs the moment, decay and (at `γ = 0`) `C₋^H` criteria on gridded data.
pub fn range_test(u: &DataGrid, s: f64, spec: &RangeSpec) -> Result<RangeReport> {
    let gamma = u.layout.gamma;
    let it = Arc::new(DataInterpolant::new(u, InterpMode::Class));
    let f: DataFn = {
        let it = it.clone();
        data_fn(move |g| it.eval(g))
    };
    let moments = moment_coeffs(&f, gamma, spec.band, &MomentSpec { tol: spec.tol, ..spec.moments })?;
    let mut criteria = vec![CriterionResult {
        name: "moments".into(),
        passed: moments.verdict,
        residual: moments.residuals.iter().cloned().fold(0.0, f64::max) / moments.scale.max(f64::MIN_POSITIVE),
        tolerance: spec.tol,
        offending: moments.offending.clone(),
        note: None,
    }];

    let mut partial_sums = Vec::with_capacity(spec.band + 1);
    let mut acc = 0.0;
    for m in 0..=spec.band {
        for k in 0..=m as i64 {
            let w = (m as f64 + 1.0 + gamma).powf(2.0 * s) / sigma_sq(BasisIndex::new(m, k), gamma)?;
            acc += w * moments.coeffs.get(m, k).norm_sqr();
        }
        partial_sums.push(acc);
    }
    let top = spec.band - spec.band / 4;
    let tail = acc - if top == 0 { 0.0 } else { partial_sums[top - 1] };
    let share = if acc > 0.0 { tail / acc } else { 0.0 };
    criteria.push(CriterionResult {
        name: "decay".into(),
        passed: acc.is_finite() && share <= spec.decay_tol,
        residual: share,
        tolerance: spec.decay_tol,
        offending: vec![],
        note: Some(format!("share of the weighted sum in degrees {top}..={}", spec.band)),
    });

    if gamma == 0.0 {
        let cu = c_minus_grid(u, spec.hilbert)?;
        let coeffs_u = analyze_data(u, spec.band)?;
        let coeffs_c = analyze_data(&cu, spec.band)?;
        let scale = coeffs_u.in_band_max().max(coeffs_u.max_abs()).max(f64::MIN_POSITIVE);
        let offending: Vec<BasisIndex> =
            coeffs_c.iter().filter(|(_, c)| c.norm() > spec.tol * scale).map(|(i, _)| i).collect();
        let residual = cu.norm() / u.norm().max(f64::MIN_POSITIVE);
        criteria.push(CriterionResult {
            name: "c_minus".into(),
            passed: offending.is_empty(),
            residual,
            tolerance: spec.tol,
            offending,
            note: None,
        });
    } else {
        criteria.push(CriterionResult {
            name: "c_minus".into(),
            passed: true,
            residual: 0.0,
            tolerance: spec.tol,
            offending: vec![],
            note: Some("boundary-operator criterion applies only at gamma = 0; omitted".into()),
        });
    }
    let all_passed = criteria.iter().all(|c| c.passed);
    Ok(RangeReport { gamma, s, criteria, moments, partial_sums, all_passed })
}
