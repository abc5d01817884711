//! Quadrature rules: Gauss–Jacobi by Golub–Welsch, the double-exponential
//! trapezoid on the real line, and the periodic trapezoid.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Nodes and weights of an interpolatory rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }

    pub fn integrate_real<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }
}

/// A quadrature value with the discrepancy between two refinement levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: Complex64) -> Self {
        Self { value, error: 0.0 }
    }

    pub fn flagged(&self, abs_tol: f64) -> bool {
        !(self.error <= abs_tol) || !self.value.re.is_finite() || !self.value.im.is_finite()
    }
}

/// Total mass `∫₋₁¹ (1−x)^α (1+x)^β dx`.
pub fn jacobi_mass(alpha: f64, beta: f64) -> f64 {
    ((alpha + beta + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(alpha + beta + 2.0))
    .exp()
}

/// Gauss–Jacobi rule for the weight `(1−x)^α (1+x)^β`, computed from the
/// eigen-decomposition of the Jacobi matrix. Nodes are ascending.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<Rule> {
    if n == 0 {
        return Err(Error::InvalidQuadSpec("Gauss–Jacobi rule needs at least one node".into()));
    }
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::InvalidQuadSpec(format!("Jacobi exponents ({alpha}, {beta}) must exceed -1")));
    }
    let ab = alpha + beta;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    diag[0] = (beta - alpha) / (ab + 2.0);
    for (k, d) in diag.iter_mut().enumerate().skip(1) {
        let kf = k as f64;
        *d = (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0));
    }
    for (i, o) in off.iter_mut().enumerate() {
        let k = (i + 1) as f64;
        let s = 2.0 * k + ab;
        *o = if i == 0 {
            (4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))).sqrt()
        } else {
            (4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))).sqrt()
        };
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = off[i];
            m[(i + 1, i)] = off[i];
        }
    }
    let eig = SymmetricEigen::new(m);
    let mass = jacobi_mass(alpha, beta);
    let mut pairs: Vec<(f64, f64)> =
        (0..n).map(|j| (eig.eigenvalues[j], mass * eig.eigenvectors[(0, j)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Rule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() })
}

pub fn gauss_legendre(n: usize) -> Result<Rule> {
    gauss_jacobi(n, 0.0, 0.0)
}

type RuleKey = (usize, u64, u64);

fn rule_cache() -> &'static RwLock<HashMap<RuleKey, Arc<Rule>>> {
    static CACHE: OnceLock<RwLock<HashMap<RuleKey, Arc<Rule>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Memoized [`gauss_jacobi`].
pub fn gauss_jacobi_cached(n: usize, alpha: f64, beta: f64) -> Result<Arc<Rule>> {
    let key = (n, alpha.to_bits(), beta.to_bits());
    if let Some(r) = rule_cache().read().expect("rule cache poisoned").get(&key) {
        return Ok(r.clone());
    }
    let rule = Arc::new(gauss_jacobi(n, alpha, beta)?);
    rule_cache().write().expect("rule cache poisoned").insert(key, rule.clone());
    Ok(rule)
}

/// Double-exponential rule for `∫_ℝ F(t) dt` when `F` decays like
/// `e^{−ν|t−c|}`: substitute `t = c + π sinh τ` (the tanh-sinh map of
/// `X = tanh((t−c)/2)`) and apply the trapezoid rule with step `2^{−level}`.
/// The error estimate compares against the rule with twice the step.
pub fn de_line_integral<F>(f: F, center: f64, decay: f64, level: u32) -> Estimate
where
    F: Fn(f64) -> Complex64,
{
    let tau_max = (55.0 / (decay.max(1e-3) * PI)).asinh().max(2.0);
    let h = 0.5f64.powi(level as i32);
    let n = (tau_max / h).ceil() as i64;
    let mut fine = Complex64::new(0.0, 0.0);
    let mut coarse = Complex64::new(0.0, 0.0);
    for j in -n..=n {
        let tau = j as f64 * h;
        let v = f(center + PI * tau.sinh()) * (PI * tau.cosh());
        fine += v;
        if j % 2 == 0 {
            coarse += v;
        }
    }
    let fine = fine * h;
    let coarse = coarse * (2.0 * h);
    Estimate { value: fine, error: (fine - coarse).norm() }
}

/// Periodic trapezoid rule for `∫₀^{2π} f(θ) dθ` with `n` nodes starting at
/// `offset`; the error estimate uses the even-indexed subset.
pub fn periodic_trapezoid<F>(f: F, n: usize, offset: f64) -> Estimate
where
    F: Fn(f64) -> Complex64,
{
    let n = n.max(2) & !1;
    let h = TAU / n as f64;
    let mut fine = Complex64::new(0.0, 0.0);
    let mut coarse = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let v = f(offset + j as f64 * h);
        fine += v;
        if j % 2 == 0 {
            coarse += v;
        }
    }
    let fine = fine * h;
    let coarse = coarse * (2.0 * h);
    Estimate { value: fine, error: (fine - coarse).norm() }
}

/// [`periodic_trapezoid`] with the node count doubled from `n` until the
/// estimate drops below `tol · max(1, |value|)` or `max_n` is reached.
/// Previously computed nodes are reused.
pub fn periodic_trapezoid_adaptive<F>(f: F, n: usize, offset: f64, tol: f64, max_n: usize) -> Estimate
where
    F: Fn(f64) -> Complex64,
{
    let mut n = n.max(2) & !1;
    let mut sum: Complex64 = (0..n).map(|j| f(offset + TAU * j as f64 / n as f64)).sum();
    let mut value = sum * (TAU / n as f64);
    let mut error = f64::INFINITY;
    while n < max_n {
        let h = TAU / (2 * n) as f64;
        let mid: Complex64 = (0..n).map(|j| f(offset + (2 * j + 1) as f64 * h)).sum();
        sum += mid;
        n *= 2;
        let next = sum * h;
        error = (next - value).norm();
        value = next;
        if error <= tol * value.norm().max(1.0) {
            break;
        }
    }
    Estimate { value, error }
}
