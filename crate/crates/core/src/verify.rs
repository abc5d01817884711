//! Machine-checkable acceptance matrix.
//!
//! Each [`CheckId`] groups one or more sub-checks; every sub-check yields a
//! [`CheckReport`] with the measured residual and the tolerance it was held to.
//! The same runner backs the `selftest` command and the acceptance tests.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cosphere_log_rate, cosphere_momentum, mu_h_finite, DiskPoint, FanBeamCoord, GeodesicHoro};
use crate::range::{
    bct_moment, c_minus_grid, c_minus_h_at, data_fn, p_minus_h_at, range_test, vertex_moment, zero_basis_h, DataFn,
    HilbertMode, MomentFamily, RangeSpec,
};
use crate::specfun::{ln_beta, psi_nk_gamma_h, sigma_sq, BasisIndex, ZernikeBasis, ZeroBasis};
use crate::spectral::{
    analyze_data, disk_field, normal_matrix, normal_operator, stability_from_matrix, svd_reconstruct, CoeffTable,
    DataGrid, DataInterpolant, DataLayout, DiskGrid, DiskLayout, InterpMode, SpectralFilter,
};
use crate::transforms::{
    backproject_hyper, backproject_via_euclid, bump, forward_grid, santalo_check, xray_euclid, xray_hyper, QuadSpec,
    SantaloSpec, ScalarField,
};
use crate::{geometry::bdf_x, spectral::adjoint_at};

/// Groups of checks, numbered as acceptance criteria 1 to 11.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckId {
    Svd,
    FuncRel,
    ProjEq,
    InterAdj,
    Santalo,
    Range,
    Boundary,
    Bct,
    Cosphere,
    Reconstruct,
    Stability,
}

impl CheckId {
    pub const ALL: [CheckId; 11] = [
        CheckId::Svd,
        CheckId::FuncRel,
        CheckId::ProjEq,
        CheckId::InterAdj,
        CheckId::Santalo,
        CheckId::Range,
        CheckId::Boundary,
        CheckId::Bct,
        CheckId::Cosphere,
        CheckId::Reconstruct,
        CheckId::Stability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::Svd => "svd",
            CheckId::FuncRel => "funcrel",
            CheckId::ProjEq => "projeq",
            CheckId::InterAdj => "interadj",
            CheckId::Santalo => "santalo",
            CheckId::Range => "range",
            CheckId::Boundary => "boundary",
            CheckId::Bct => "bct",
            CheckId::Cosphere => "cosphere",
            CheckId::Reconstruct => "reconstruct",
            CheckId::Stability => "stability",
        }
    }

    pub fn criterion(self) -> u8 {
        Self::ALL.iter().position(|&c| c == self).unwrap() as u8 + 1
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| format!("unknown check '{s}'"))
    }
}

/// Parses a comma-separated check list such as `svd,range`.
pub fn parse_check_set(s: &str) -> std::result::Result<Vec<CheckId>, String> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(CheckId::from_str).collect()
}

/// Tolerances of the acceptance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub svd: f64,
    pub svd_seconds: f64,
    pub funcrel: f64,
    pub funcrel_scalar: f64,
    pub projeq: f64,
    pub interadj: f64,
    pub adjoint_pairing: f64,
    pub santalo: f64,
    pub range: f64,
    pub boundary_spectral: f64,
    pub boundary_pv: f64,
    pub bct: f64,
    pub cosphere_variance: f64,
    pub cosphere_value: f64,
    pub cosphere_limit: f64,
    pub reconstruct: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            svd: 1e-6,
            svd_seconds: 60.0,
            funcrel: 1e-6,
            funcrel_scalar: 1e-12,
            projeq: 1e-7,
            interadj: 1e-6,
            adjoint_pairing: 1e-6,
            santalo: 1e-4,
            range: 1e-6,
            boundary_spectral: 1e-8,
            boundary_pv: 1e-3,
            bct: 1e-8,
            cosphere_variance: 1e-18,
            cosphere_value: 1e-10,
            cosphere_limit: 1e-6,
            reconstruct: 1e-6,
        }
    }
}

/// Sizes and seeds of the acceptance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub gammas: Vec<f64>,
    pub seed: u64,
    pub tol: Tolerances,
    pub quad: QuadSpec,
    pub svd_band: usize,
    pub funcrel_band: usize,
    pub funcrel_scalar_band: usize,
    pub projeq_samples: usize,
    pub interadj_points: usize,
    pub adjoint_pairs: usize,
    pub range_band: usize,
    pub boundary_band: usize,
    pub pv_band: usize,
    pub bct_degree: usize,
    pub reconstruct_band: usize,
    pub stability_band: usize,
    pub stability_probes: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            gammas: vec![-0.5, 0.0, 1.0],
            seed: 20240501,
            tol: Tolerances::default(),
            quad: QuadSpec::default(),
            svd_band: 10,
            funcrel_band: 10,
            funcrel_scalar_band: 30,
            projeq_samples: 200,
            interadj_points: 20,
            adjoint_pairs: 5,
            range_band: 8,
            boundary_band: 8,
            pv_band: 4,
            bct_degree: 8,
            reconstruct_band: 16,
            stability_band: 8,
            stability_probes: 50,
        }
    }
}

/// Sub-checks that test a published eigenvalue sign which contradicts the
/// convention under which the companion identities hold. Callers treat a
/// failure of these as the expected outcome.
pub const EXPECTED_FAILURES: &[&str] = &["cminus-stated-sign(0,-1)"];

/// Outcome of one sub-check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: CheckId,
    pub criterion: u8,
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub details: String,
    pub seconds: f64,
}

impl CheckReport {
    fn new(id: CheckId, name: &str, residual: f64, tolerance: f64, details: String) -> Self {
        Self {
            id,
            criterion: id.criterion(),
            name: name.to_string(),
            passed: residual.is_finite() && residual <= tolerance,
            residual,
            tolerance,
            details,
            seconds: 0.0,
        }
    }

    fn failed(id: CheckId, name: &str, err: &Error) -> Self {
        Self {
            id,
            criterion: id.criterion(),
            name: name.to_string(),
            passed: false,
            residual: f64::NAN,
            tolerance: f64::NAN,
            details: format!("error: {err}"),
            seconds: 0.0,
        }
    }

    /// One status line, `PASS [3] projeq residual=… tol=…`.
    pub fn line(&self) -> String {
        format!(
            "{} [{}] {:<26} residual={:.3e} tol={:.1e} ({:.1}s) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.criterion,
            self.name,
            self.residual,
            self.tolerance,
            self.seconds,
            self.details
        )
    }
}

/// Runs one check group.
pub fn run_check(id: CheckId, cfg: &SuiteConfig) -> Vec<CheckReport> {
    let start = Instant::now();
    let out = match id {
        CheckId::Svd => check_svd(cfg),
        CheckId::FuncRel => check_funcrel(cfg),
        CheckId::ProjEq => check_projeq(cfg),
        CheckId::InterAdj => check_interadj(cfg),
        CheckId::Santalo => check_santalo(cfg),
        CheckId::Range => check_range(cfg),
        CheckId::Boundary => check_boundary(cfg),
        CheckId::Bct => check_bct(cfg),
        CheckId::Cosphere => check_cosphere(cfg),
        CheckId::Reconstruct => check_reconstruct(cfg),
        CheckId::Stability => check_stability(cfg),
    };
    let mut reports = out.unwrap_or_else(|e| vec![CheckReport::failed(id, id.name(), &e)]);
    let secs = start.elapsed().as_secs_f64() / reports.len().max(1) as f64;
    for r in &mut reports {
        if r.seconds == 0.0 {
            r.seconds = secs;
        }
    }
    reports
}

/// Runs the listed groups in order (all of them when `only` is empty).
pub fn run_suite(only: &[CheckId], cfg: &SuiteConfig) -> Vec<CheckReport> {
    let ids: Vec<CheckId> = if only.is_empty() { CheckId::ALL.to_vec() } else { only.to_vec() };
    ids.into_iter().flat_map(|id| run_check(id, cfg)).collect()
}

fn rng(cfg: &SuiteConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn crand(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

fn random_disk_table(gamma: f64, n: usize, r: &mut ChaCha8Rng) -> Result<CoeffTable> {
    let mut c = CoeffTable::new_disk(gamma, n)?;
    for m in 0..=n {
        for k in 0..=m as i64 {
            c.set(m, k, crand(r))?;
        }
    }
    Ok(c)
}

fn data_sum(c: &CoeffTable) -> DataFn {
    let entries: Vec<(BasisIndex, Complex64)> = c.iter().collect();
    let gamma = c.gamma;
    data_fn(move |g| entries.iter().map(|(i, v)| v * psi_nk_gamma_h(*i, gamma, g).unwrap_or_default()).sum())
}

/// A smooth, non-radial Euclidean phantom with no special symmetry.
pub fn generic_phantom() -> ScalarField {
    ScalarField::euclidean(|w| {
        let z = w.z();
        Complex64::new(1.0 + 0.3 * z.re - 0.2 * z.im * z.im, 0.5 * z.re * z.im) * (-(z - 0.2).norm_sqr()).exp()
    })
}

/// Smooth data in `μ_h² C^∞` with angular dependence.
pub fn smooth_data() -> DataFn {
    data_fn(|g| {
        let a = g.a.finite().unwrap_or(0.0);
        let mu = mu_h_finite(a);
        Complex64::new(mu * mu * (1.0 + 0.3 * g.beta.cos()), 0.2 * mu * mu * a * mu * (2.0 * g.beta).sin())
    })
}

fn check_svd(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let start = Instant::now();
    let n_max = cfg.svd_band;
    let mut ratio_res = 0.0f64;
    let mut triple_res = 0.0f64;
    let mut worst = String::new();
    for &gamma in &cfg.gammas {
        let basis = Arc::new(ZernikeBasis::new(gamma, n_max)?);
        let layout = DataLayout::for_band(gamma, n_max);
        let disk = DiskLayout::for_band(gamma, n_max);
        for n in 0..=n_max {
            for k in 0..=n {
                let f = ScalarField::zernike_pullback(basis.clone(), n, k);
                let (u, _) = forward_grid(&f, layout, &cfg.quad)?;
                let fg = DiskGrid::from_fn(disk, |z| f.eval(z))?;
                let sigma = basis.sigma(n, k);
                let r = (u.norm() / fg.norm() / sigma - 1.0).abs();
                if r > ratio_res {
                    ratio_res = r;
                    worst = format!("worst at gamma={gamma} n={n} k={k}");
                }
                let idx = BasisIndex::new(n, k as i64);
                let psi = DataGrid::from_fn(layout, |g| psi_nk_gamma_h(idx, gamma, g).unwrap_or_default() * sigma)?;
                triple_res = triple_res.max(u.sub(&psi)?.norm() / sigma);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let mut a = CheckReport::new(CheckId::Svd, "svd-norm-ratio", ratio_res, cfg.tol.svd, worst);
    let mut b = CheckReport::new(CheckId::Svd, "svd-triple", triple_res, cfg.tol.svd, format!("n <= {n_max}"));
    let c = CheckReport::new(CheckId::Svd, "svd-runtime", secs, cfg.tol.svd_seconds, "seconds".into());
    a.seconds = secs;
    b.seconds = secs;
    Ok(vec![a, b, CheckReport { seconds: secs, ..c }])
}

/// Right-hand side of the functional relation at `(D, D_ω) = (d, dw)`.
pub fn funcrel_multiplier(d: f64, dw: f64, gamma: f64) -> f64 {
    let ln = (2.0 * gamma + 2.0) * std::f64::consts::LN_2 + PI.ln() - (d + 1.0).ln()
        + ln_beta((d + dw) / 2.0 + 1.0 + gamma, (d - dw) / 2.0 + 1.0 + gamma)
        - ln_beta((d + dw) / 2.0 + 1.0, (d - dw) / 2.0 + 1.0);
    ln.exp()
}

fn check_funcrel(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let mut scalar = 0.0f64;
    for &gamma in &cfg.gammas {
        for n in 0..=cfg.funcrel_scalar_band {
            for k in 0..=n as i64 {
                let s = sigma_sq(BasisIndex::new(n, k), gamma)?;
                let m = funcrel_multiplier(n as f64, (n as i64 - 2 * k) as f64, gamma);
                scalar = scalar.max((m / s - 1.0).abs());
                if gamma == 0.0 {
                    scalar = scalar.max((s * (n as f64 + 1.0) / (4.0 * PI) - 1.0).abs());
                }
            }
        }
    }
    let basis = Arc::new(ZernikeBasis::new(0.0, cfg.funcrel_band)?);
    let points = crate::spectral::probe_points();
    let mut res = 0.0f64;
    let mut worst = String::new();
    for n in 0..=cfg.funcrel_band {
        for k in 0..=n {
            let f = ScalarField::zernike_pullback(basis.clone(), n, k);
            let lam = 4.0 * PI / (n as f64 + 1.0);
            let nf = normal_operator(&f, 0.0, &points, &cfg.quad)?;
            let scale = points.iter().map(|&z| f.eval(z).norm()).fold(0.0, f64::max) * lam;
            let r =
                nf.iter().zip(&points).map(|(e, &z)| (e.value - f.eval(z) * lam).norm()).fold(0.0, f64::max) / scale;
            if r > res {
                res = r;
                worst = format!("worst at n={n} k={k}");
            }
        }
    }
    Ok(vec![
        CheckReport::new(CheckId::FuncRel, "funcrel-normal-eigen", res, cfg.tol.funcrel, worst),
        CheckReport::new(
            CheckId::FuncRel,
            "funcrel-scalar",
            scalar,
            cfg.tol.funcrel_scalar,
            format!("n <= {}", cfg.funcrel_scalar_band),
        ),
    ])
}

fn check_projeq(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let f = generic_phantom();
    let fh = f.pullback()?;
    let mut out = Vec::new();
    for &gamma in &cfg.gammas {
        let mut r = rng(cfg, 3);
        let samples: Vec<(f64, f64)> =
            (0..cfg.projeq_samples).map(|_| (r.gen_range(0.0..TAU), r.gen_range(-1.55..1.55f64).tan())).collect();
        let pairs: Vec<(Complex64, Complex64)> = samples
            .par_iter()
            .map(|&(beta, a)| -> Result<_> {
                let lhs = xray_hyper(&fh, gamma, GeodesicHoro::new(beta, a), &cfg.quad)?.value;
                let rhs = xray_euclid(&f, gamma, FanBeamCoord::new(beta, a.atan()), &cfg.quad)?.value * mu_h_finite(a);
                Ok((lhs, rhs))
            })
            .collect::<Result<_>>()?;
        let scale = pairs.iter().map(|p| p.1.norm()).fold(0.0, f64::max);
        let res = pairs.iter().map(|(l, r)| (l - r).norm()).fold(0.0, f64::max) / scale;
        out.push(CheckReport::new(
            CheckId::ProjEq,
            &format!("projeq-forward(g={gamma})"),
            res,
            cfg.tol.projeq,
            format!("{} geodesics", cfg.projeq_samples),
        ));
    }
    Ok(out)
}

fn check_interadj(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let u = smooth_data();
    let mut r = rng(cfg, 4);
    let pts: Vec<DiskPoint> = (0..cfg.interadj_points)
        .map(|_| DiskPoint::from_polar(r.gen_range(0.0..0.9f64).sqrt(), r.gen_range(0.0..TAU)))
        .collect();
    let pairs: Vec<(Complex64, Complex64)> = pts
        .par_iter()
        .map(|&z| -> Result<_> {
            Ok((
                backproject_hyper(|g| u(g), z, &cfg.quad)?.value,
                backproject_via_euclid(|g| u(g), z, &cfg.quad)?.value,
            ))
        })
        .collect::<Result<_>>()?;
    let scale = pairs.iter().map(|p| p.0.norm()).fold(0.0, f64::max);
    let res = pairs.iter().map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
    let mut out = vec![CheckReport::new(
        CheckId::InterAdj,
        "interadj-backprojection",
        res,
        cfg.tol.interadj,
        format!("{} points", pts.len()),
    )];

    // ⟨I f, u⟩ against ⟨f, I* u⟩ for random band-limited pairs.
    let n = 4;
    for &gamma in &cfg.gammas {
        let mut worst = 0.0f64;
        for p in 0..cfg.adjoint_pairs {
            let mut r = rng(cfg, 40 + p as u64);
            let fc = random_disk_table(gamma, n, &mut r)?;
            let mut uc = CoeffTable::new_data(gamma, n, n as i64 + 2)?;
            let idx: Vec<BasisIndex> = uc.iter().map(|(i, _)| i).collect();
            for i in idx {
                uc.set(i.n, i.k, crand(&mut r))?;
            }
            let f = disk_field(&fc)?;
            let layout = DataLayout::for_band(gamma, n);
            let (fwd, _) = forward_grid(&f, layout, &cfg.quad)?;
            let ud = data_sum(&uc);
            let ug = DataGrid::from_fn(layout, |g| ud(g))?;
            let lhs = fwd.inner(&ug)?;
            let disk = DiskLayout::for_band(gamma, n);
            let fg = DiskGrid::from_fn(disk, |z| f.eval(z))?;
            let mut adj = DiskGrid::zeros(disk)?;
            let nr = disk.n_radial;
            adj.samples = (0..adj.samples.len())
                .into_par_iter()
                .map(|q| adjoint_at(|g| ud(g), gamma, adj.node_hyper(q / nr, q % nr), &cfg.quad).map(|e| e.value))
                .collect::<Result<_>>()?;
            let rhs = fg.inner(&adj)?;
            worst = worst.max((lhs - rhs).norm() / (fwd.norm() * ug.norm()));
        }
        out.push(CheckReport::new(
            CheckId::InterAdj,
            &format!("adjoint-pairing(g={gamma})"),
            worst,
            cfg.tol.adjoint_pairing,
            format!("{} pairs", cfg.adjoint_pairs),
        ));
    }
    Ok(out)
}

fn check_santalo(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let spec = SantaloSpec::default();
    let eps = 0.2;
    let center = DiskPoint::new(0.3, 0.2);
    type Test = Box<dyn Fn(crate::geometry::UnitTangent) -> f64 + Sync>;
    let tests: Vec<(&str, Test)> = vec![
        ("santalo-radial", Box::new(|v| bump(bdf_x(v.z), 0.5, 0.3))),
        (
            "santalo-direction",
            Box::new(|v| {
                bump(bdf_x(v.z), 0.6, 0.25) * (1.0 + 0.5 * v.theta.cos() + 0.3 * (2.0 * v.theta - v.z.omega()).sin())
            }),
        ),
        ("santalo-offcenter", Box::new(move |v| bump((v.z.z() - center.z()).norm(), 0.0, 0.3))),
    ];
    let mut out = Vec::new();
    for (name, f) in tests {
        let (l, r) = santalo_check(&f, eps, &spec)?;
        out.push(CheckReport::new(
            CheckId::Santalo,
            name,
            (l - r).abs() / r.abs(),
            cfg.tol.santalo,
            format!("lhs={l:.10} rhs={r:.10}"),
        ));
    }
    Ok(out)
}

fn check_range(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let gamma = 0.0;
    let band = cfg.range_band;
    let layout = DataLayout::for_band(gamma, band);
    let spec = RangeSpec { tol: cfg.tol.range, ..RangeSpec::new(band) };
    let mut out = Vec::new();

    // (a) forward data passes both criteria.
    let mut r = rng(cfg, 6);
    let fc = random_disk_table(gamma, band.saturating_sub(3), &mut r)?;
    let f = disk_field(&fc)?;
    let (clean, _) = forward_grid(&f, layout, &cfg.quad)?;
    let rep = range_test(&clean, 1.0, &spec)?;
    for c in &rep.criteria {
        if c.name == "decay" {
            continue;
        }
        out.push(CheckReport {
            passed: c.passed,
            ..CheckReport::new(
                CheckId::Range,
                &format!("range-forward-{}", c.name),
                c.residual,
                spec.tol,
                String::new(),
            )
        });
    }

    // (c) P₋ of odd band-limited data is annihilated by C₋.
    let mut w = CoeffTable::new_data(gamma, 4, 6)?;
    let idx: Vec<BasisIndex> = w.iter().map(|(i, _)| i).collect();
    for i in idx {
        w.set(i.n, i.k, crand(&mut r))?;
    }
    let wf: DataFn = {
        let entries: Vec<(BasisIndex, Complex64)> = w.iter().collect();
        data_fn(move |g| entries.iter().map(|(i, v)| v * zero_basis_h(*i, ZeroBasis::Phi, g)).sum())
    };
    let mut pw = DataGrid::zeros(layout)?;
    let na = layout.n_alpha;
    pw.samples = (0..pw.samples.len())
        .into_par_iter()
        .map(|p| p_minus_h_at(&wf, pw.node(p / na, p % na), spec.hilbert).map(|e| e.value))
        .collect::<Result<_>>()?;
    let cpw = analyze_data(&c_minus_grid(&pw, spec.hilbert)?, band)?;
    let res = cpw.max_abs() / analyze_data(&pw, band)?.max_abs();
    out.push(CheckReport::new(CheckId::Range, "range-pminus-in-kernel-of-cminus", res, spec.tol, String::new()));

    // Injected kernel components are reported by both criteria.
    let injected = [BasisIndex::new(2, 3), BasisIndex::new(1, -1)];
    let mut dirty = clean.clone();
    for (t, &i) in injected.iter().enumerate() {
        let k =
            DataGrid::from_fn(layout, |g| psi_nk_gamma_h(i, gamma, g).unwrap_or_default() * (0.05 + 0.05 * t as f64))?;
        dirty.samples.iter_mut().zip(&k.samples).for_each(|(a, b)| *a += b);
    }
    let rep = range_test(&dirty, 1.0, &spec)?;
    let mut expect = injected.to_vec();
    expect.sort_by_key(|i| (i.n, i.k));
    let sorted = |v: &[BasisIndex]| {
        let mut v = v.to_vec();
        v.sort_by_key(|i| (i.n, i.k));
        v
    };
    let m = sorted(&rep.criteria[0].offending);
    let c = sorted(&rep.criteria[2].offending);
    let ok = !rep.criteria[0].passed && !rep.criteria[2].passed && m == expect && c == expect;
    out.push(CheckReport {
        passed: ok,
        ..CheckReport::new(
            CheckId::Range,
            "range-kernel-detection",
            if ok { 0.0 } else { 1.0 },
            0.0,
            format!("moments {:?} / c_minus {:?}", pairs(&m), pairs(&c)),
        )
    });
    Ok(out)
}

fn pairs(v: &[BasisIndex]) -> Vec<(usize, i64)> {
    v.iter().map(|i| (i.n, i.k)).collect()
}

/// Probe geodesics for the boundary operators.
fn boundary_probes() -> [GeodesicHoro; 3] {
    [GeodesicHoro::new(0.4, 0.3), GeodesicHoro::new(2.2, -1.7), GeodesicHoro::new(5.0, 4.5)]
}

/// `C₋^H ψₙₖ^H = −i(1_{k<0} − 1_{k>n}) ψₙₖ^H` for the fiberwise `H₋ = −i sgn`.
pub fn c_minus_eigenvalue(n: usize, k: i64) -> Complex64 {
    let ind = (k < 0) as i32 as f64 - (k > n as i64) as i32 as f64;
    Complex64::new(0.0, -ind)
}

fn boundary_residual(n_max: usize, mode: HilbertMode, c_eig: impl Fn(usize, i64) -> Complex64) -> Result<(f64, f64)> {
    let mut c_res = 0.0f64;
    let mut p_res = 0.0f64;
    for n in 0..=n_max {
        for k in -2i64..=n as i64 + 2 {
            let idx = BasisIndex::new(n, k);
            let psi = data_fn(move |g| zero_basis_h(idx, ZeroBasis::Psi, g));
            let phi = data_fn(move |g| zero_basis_h(idx, ZeroBasis::Phi, g));
            let lam = c_eig(n, k);
            let p_lam = if (0..=n as i64).contains(&k) { Complex64::new(0.0, -2.0) } else { Complex64::new(0.0, 0.0) };
            for g in boundary_probes() {
                let scale = psi(g).norm().max(phi(g).norm()).max(1e-3);
                let c = c_minus_h_at(&psi, g, mode)?.value;
                c_res = c_res.max((c - psi(g) * lam).norm() / scale);
                let p = p_minus_h_at(&phi, g, mode)?.value;
                p_res = p_res.max((p - psi(g) * p_lam).norm() / scale);
            }
        }
    }
    Ok((c_res, p_res))
}

fn check_boundary(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let t = &cfg.tol;
    let (cs, ps) = boundary_residual(cfg.boundary_band, HilbertMode::spectral(), c_minus_eigenvalue)?;
    let (cp, pp) = boundary_residual(cfg.pv_band, HilbertMode::pv(), c_minus_eigenvalue)?;
    let mut out = vec![
        CheckReport::new(
            CheckId::Boundary,
            "cminus-spectral",
            cs,
            t.boundary_spectral,
            "eigenvalue -i(1[k<0]-1[k>n])".into(),
        ),
        CheckReport::new(
            CheckId::Boundary,
            "pminus-spectral",
            ps,
            t.boundary_spectral,
            "eigenvalue -2i 1[0<=k<=n]".into(),
        ),
        CheckReport::new(CheckId::Boundary, "cminus-pv", cp, t.boundary_pv, String::new()),
        CheckReport::new(CheckId::Boundary, "pminus-pv", pp, t.boundary_pv, String::new()),
    ];
    // The published eigenvalue of C₋ on the kernel carries the opposite sign.
    let idx = BasisIndex::new(0, -1);
    let psi = data_fn(move |g| zero_basis_h(idx, ZeroBasis::Psi, g));
    let mut res = 0.0f64;
    for g in boundary_probes() {
        let c = c_minus_h_at(&psi, g, HilbertMode::spectral())?.value;
        res = res.max((c - psi(g) * Complex64::new(0.0, 1.0)).norm() / psi(g).norm());
    }
    out.push(CheckReport::new(
        CheckId::Boundary,
        "cminus-stated-sign(0,-1)",
        res,
        t.boundary_spectral,
        "C- psi(0,-1) against +i psi(0,-1)".into(),
    ));
    Ok(out)
}

fn check_bct(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let gamma = 0.0;
    let basis = Arc::new(ZernikeBasis::new(gamma, 4)?);
    let f = ScalarField::zernike_pullback(basis, 4, 1);
    let layout = DataLayout::for_band(gamma, 6);
    let (fwd, _) = forward_grid(&f, layout, &cfg.quad)?;
    let it = Arc::new(DataInterpolant::new(&fwd, InterpMode::Class));
    let corpus: Vec<(&str, DataFn)> = vec![
        ("psi(3,1)", data_fn(|g| zero_basis_h(BasisIndex::new(3, 1), ZeroBasis::Psi, g))),
        ("psi(2,-1)", data_fn(|g| zero_basis_h(BasisIndex::new(2, -1), ZeroBasis::Psi, g))),
        ("smooth", smooth_data()),
        ("forward(Z41)", data_fn(move |g| it.eval(g))),
    ];
    let mut out = Vec::new();
    for (name, u) in corpus {
        let mut res = 0.0f64;
        for m in 0..=cfg.bct_degree {
            for omega in [0.3, 2.9, 4.4] {
                let b = bct_moment(&u, m, omega, 7).value;
                let v = vertex_moment(&u, gamma, m, omega, MomentFamily::Monomial, 96)?;
                res = res.max((b - v).norm() / v.norm().max(1e-3));
            }
        }
        out.push(CheckReport::new(
            CheckId::Bct,
            &format!("bct-{name}"),
            res,
            cfg.tol.bct,
            format!("m <= {}", cfg.bct_degree),
        ));
    }
    Ok(out)
}

fn check_cosphere(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let mut var = 0.0f64;
    let mut val = 0.0f64;
    let mut lim = 0.0f64;
    for a in [2.0, -0.7, 0.3, 5.0] {
        let g = GeodesicHoro::new(1.1, a);
        for c in [1.0, 2.0] {
            let vals: Vec<f64> = (-6..=6).map(|i| cosphere_momentum(g, 0.5 * i as f64, c)).collect::<Result<_>>()?;
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            var = var.max(vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64);
            val = val.max((mean + a).abs());
        }
        lim = lim.max((cosphere_log_rate(g, 30.0)? + 1.0).abs());
        lim = lim.max((cosphere_log_rate(g, -30.0)? - 1.0).abs());
    }
    Ok(vec![
        CheckReport::new(CheckId::Cosphere, "cosphere-variance", var, cfg.tol.cosphere_variance, String::new()),
        CheckReport::new(CheckId::Cosphere, "cosphere-equals-minus-a", val, cfg.tol.cosphere_value, String::new()),
        CheckReport::new(CheckId::Cosphere, "cosphere-log-rate-limits", lim, cfg.tol.cosphere_limit, "|t| = 30".into()),
    ])
}

fn check_reconstruct(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for &gamma in &cfg.gammas {
        let mut worst = 0.0f64;
        let mut bands = vec![4, 8, cfg.reconstruct_band];
        bands.dedup();
        for n in bands {
            let mut r = rng(cfg, 10 + n as u64);
            let fc = random_disk_table(gamma, n, &mut r)?;
            let f = disk_field(&fc)?;
            let (u, _) = forward_grid(&f, DataLayout::for_band(gamma, n), &cfg.quad)?;
            let rec = svd_reconstruct(&u, n, SpectralFilter::Truncate, None)?;
            let truth = DiskGrid::from_fn(rec.grid.layout, |z| f.eval(z))?;
            worst = worst.max(rec.grid.sub(&truth)?.norm() / truth.norm());
        }
        out.push(CheckReport::new(
            CheckId::Reconstruct,
            &format!("reconstruct-band-limited(g={gamma})"),
            worst,
            cfg.tol.reconstruct,
            format!("N in {{4, 8, {}}}", cfg.reconstruct_band),
        ));

        let f = generic_phantom().pullback()?;
        let fine = DiskLayout::for_band(gamma, 2 * cfg.reconstruct_band);
        let truth = DiskGrid::from_fn(fine, |z| f.eval(z))?;
        let errs: Vec<f64> = (1..=cfg.reconstruct_band / 2)
            .map(|h| -> Result<f64> {
                let n = 2 * h;
                let (u, _) = forward_grid(&f, DataLayout::for_band(gamma, n), &cfg.quad)?;
                let rec = svd_reconstruct(&u, n, SpectralFilter::Truncate, Some(fine))?;
                Ok(rec.grid.sub(&truth)?.norm() / truth.norm())
            })
            .collect::<Result<_>>()?;
        let monotone = errs.windows(2).all(|w| w[1] < w[0]);
        out.push(CheckReport {
            passed: monotone,
            ..CheckReport::new(
                CheckId::Reconstruct,
                &format!("reconstruct-monotone(g={gamma})"),
                *errs.last().unwrap_or(&f64::NAN),
                f64::INFINITY,
                format!("errors {:?}", errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>()),
            )
        });
    }
    Ok(out)
}

fn check_stability(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for &gamma in &cfg.gammas {
        let (idx, cols) = normal_matrix(gamma, cfg.stability_band, &cfg.quad)?;
        for s in [0.0, 1.0] {
            let rep = stability_from_matrix(gamma, s, cfg.stability_band, cfg.stability_probes, cfg.seed, &idx, &cols)?;
            out.push(CheckReport {
                passed: rep.two_sided,
                ..CheckReport::new(
                    CheckId::Stability,
                    &format!("stability(g={gamma},s={s})"),
                    rep.c2 / rep.c1,
                    f64::INFINITY,
                    format!("C1={:.4e} C2={:.4e} shifts=({}, {})", rep.c1, rep.c2, rep.shift_lower, rep.shift_upper),
                )
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::sigma_nk;

    #[test]
    fn check_ids_round_trip() {
        for id in CheckId::ALL {
            assert_eq!(id.name().parse::<CheckId>().unwrap(), id);
        }
        assert_eq!(CheckId::Svd.criterion(), 1);
        assert_eq!(CheckId::Stability.criterion(), 11);
        assert_eq!(parse_check_set("svd, range").unwrap(), vec![CheckId::Svd, CheckId::Range]);
        assert!(parse_check_set("nope").is_err());
    }

    #[test]
    fn funcrel_multiplier_matches_sigma() {
        for gamma in [-0.5, 0.0, 0.7] {
            for n in 0..6usize {
                for k in 0..=n as i64 {
                    let s = sigma_sq(BasisIndex::new(n, k), gamma).unwrap();
                    let m = funcrel_multiplier(n as f64, (n as i64 - 2 * k) as f64, gamma);
                    assert!((m / s - 1.0).abs() < 1e-13);
                }
            }
        }
        assert!((sigma_nk(BasisIndex::new(3, 1), 0.0).unwrap().powi(2) * 4.0 - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn cosphere_group_passes() {
        let reps = run_check(CheckId::Cosphere, &SuiteConfig::default());
        assert!(reps.iter().all(|r| r.passed), "{reps:?}");
    }

    #[test]
    fn failures_become_reports() {
        let cfg = SuiteConfig { gammas: vec![-2.0], ..Default::default() };
        let reps = run_check(CheckId::ProjEq, &cfg);
        assert_eq!(reps.len(), 1);
        assert!(!reps[0].passed);
        assert!(reps[0].details.contains("gamma"));
        assert!(reps[0].line().starts_with("FAIL [3]"));
    }
}
