//! Phantom descriptors.
//!
//! Disk phantoms: `zernike:n,k[,c]` (terms joined with `+`), `bump:c,w`,
//! `gauss:cx,cy,s`, `xpow:p`, `random:N`. Data phantoms: `data-const:c`,
//! `data-psi:n,k`.

use hyperxray::geometry::bdf_x;
use hyperxray::range::{data_fn, DataFn};
use hyperxray::specfun::psi_nk_gamma_h;
use hyperxray::spectral::disk_field;
use hyperxray::transforms::bump;
use hyperxray::{BasisIndex, CoeffTable, Complex64, DiskModel, ScalarField, SmoothnessClass};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;

#[derive(Clone)]
pub enum Phantom {
    Disk {
        field: ScalarField,
        /// Exact disk coefficients when the phantom is band-limited.
        coeffs: Option<CoeffTable>,
    },
    Data(DataFn),
}

impl std::fmt::Debug for Phantom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Phantom::Disk { coeffs, .. } => write!(f, "Disk(band-limited: {})", coeffs.is_some()),
            Phantom::Data(_) => f.write_str("Data"),
        }
    }
}

fn bad(desc: &str, why: &str) -> CliError {
    CliError::Input(format!("bad phantom descriptor '{desc}': {why}"))
}

fn numbers(desc: &str, args: &str, min: usize, max: usize) -> Result<Vec<f64>, CliError> {
    let v: Vec<f64> = args
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad(desc, &format!("'{s}' is not a number"))))
        .collect::<Result<_, _>>()?;
    if v.len() < min || v.len() > max {
        return Err(bad(desc, &format!("expected {min} to {max} arguments, found {}", v.len())));
    }
    Ok(v)
}

fn index(desc: &str, v: &[f64]) -> Result<(usize, i64), CliError> {
    if v[0] < 0.0 || v[0].fract() != 0.0 || v[1].fract() != 0.0 {
        return Err(bad(desc, "indices must be integers with n >= 0"));
    }
    Ok((v[0] as usize, v[1] as i64))
}

pub fn parse(desc: &str, gamma: f64, seed: u64) -> Result<Phantom, CliError> {
    let desc = desc.trim();
    let (kind, args) = desc.split_once(':').ok_or_else(|| bad(desc, "missing ':'"))?;
    match kind {
        "zernike" => {
            let mut terms = Vec::new();
            for term in desc.split('+') {
                let args =
                    term.trim().strip_prefix("zernike:").ok_or_else(|| bad(desc, "every term must be zernike:"))?;
                let v = numbers(desc, args, 2, 3)?;
                let (n, k) = index(desc, &v)?;
                if k < 0 || k > n as i64 {
                    return Err(bad(desc, &format!("zernike index (n={n}, k={k}) needs 0 <= k <= n")));
                }
                terms.push((n, k, v.get(2).copied().unwrap_or(1.0)));
            }
            let n_max = terms.iter().map(|t| t.0).max().unwrap_or(0);
            let mut c = CoeffTable::new_disk(gamma, n_max)?;
            for (n, k, v) in terms {
                c.set(n, k, c.get(n, k) + v)?;
            }
            Ok(Phantom::Disk { field: disk_field(&c)?, coeffs: Some(c) })
        }
        "random" => {
            let v = numbers(desc, args, 1, 1)?;
            if v[0] < 0.0 || v[0].fract() != 0.0 {
                return Err(bad(desc, "band must be a non-negative integer"));
            }
            let n_max = v[0] as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut c = CoeffTable::new_disk(gamma, n_max)?;
            for n in 0..=n_max {
                for k in 0..=n as i64 {
                    c.set(n, k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))?;
                }
            }
            Ok(Phantom::Disk { field: disk_field(&c)?, coeffs: Some(c) })
        }
        "bump" => {
            let v = numbers(desc, args, 2, 2)?;
            let (c, w) = (v[0], v[1]);
            if !(w > 0.0) {
                return Err(bad(desc, "width must be positive"));
            }
            let field = ScalarField::new(DiskModel::Poincare, SmoothnessClass::Even, move |z| {
                Complex64::new(bump(bdf_x(z), c, w), 0.0)
            });
            Ok(Phantom::Disk { field, coeffs: None })
        }
        "gauss" => {
            let v = numbers(desc, args, 3, 3)?;
            let (cx, cy, s) = (v[0], v[1], v[2]);
            if !(s > 0.0) {
                return Err(bad(desc, "width must be positive"));
            }
            let field = ScalarField::new(DiskModel::Poincare, SmoothnessClass::Generic, move |z| {
                let d2 = (z.re - cx).powi(2) + (z.im - cy).powi(2);
                Complex64::new((-d2 / (2.0 * s * s)).exp(), 0.0)
            });
            Ok(Phantom::Disk { field, coeffs: None })
        }
        "xpow" => {
            let p = numbers(desc, args, 1, 1)?[0];
            let class = if p >= 0.0 && p.fract() == 0.0 && (p as i64) % 2 == 0 {
                SmoothnessClass::Even
            } else {
                SmoothnessClass::Generic
            };
            let field = ScalarField::new(DiskModel::Poincare, class, move |z| Complex64::new(bdf_x(z).powf(p), 0.0));
            Ok(Phantom::Disk { field, coeffs: None })
        }
        "data-const" => {
            let c = numbers(desc, args, 1, 1)?[0];
            Ok(Phantom::Data(data_fn(move |_| Complex64::new(c, 0.0))))
        }
        "data-psi" => {
            let v = numbers(desc, args, 2, 2)?;
            let (n, k) = index(desc, &v)?;
            hyperxray::error::check_gamma(gamma)?;
            let idx = BasisIndex::new(n, k);
            Ok(Phantom::Data(data_fn(move |g| psi_nk_gamma_h(idx, gamma, g).unwrap_or_default())))
        }
        _ => Err(bad(desc, &format!("unknown kind '{kind}'"))),
    }
}

/// The single basis function `Φ̂*Zₙₖ` if the phantom is exactly one, with unit coefficient.
pub fn single_zernike(p: &Phantom) -> Option<BasisIndex> {
    let Phantom::Disk { coeffs: Some(c), .. } = p else { return None };
    let mut nz = c.iter().filter(|(_, v)| v.norm() != 0.0);
    let (i, v) = nz.next()?;
    (nz.next().is_none() && v == Complex64::new(1.0, 0.0)).then_some(i)
}
