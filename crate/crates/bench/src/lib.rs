//! Fixtures shared by the benchmarks.

use hyperxray::spectral::disk_field;
use hyperxray::transforms::forward_grid;
use hyperxray::{CoeffTable, Complex64, DataGrid, DataLayout, QuadSpec, ScalarField};

/// Disk coefficients with every slot `0 <= k <= n <= n_max` filled deterministically.
pub fn dense_coeffs(gamma: f64, n_max: usize) -> CoeffTable {
    let mut c = CoeffTable::new_disk(gamma, n_max).expect("valid gamma");
    for n in 0..=n_max {
        for k in 0..=n as i64 {
            let t = (n * 7 + k as usize * 3) as f64;
            c.set(n, k, Complex64::new(t.sin(), (0.5 * t).cos() / (1.0 + n as f64))).expect("in band");
        }
    }
    c
}

pub fn dense_field(gamma: f64, n_max: usize) -> ScalarField {
    disk_field(&dense_coeffs(gamma, n_max)).expect("valid table")
}

/// Forward data of [`dense_field`] on the default layout for the band.
pub fn dense_data(gamma: f64, n_max: usize) -> DataGrid {
    let layout = DataLayout::for_band(gamma, n_max);
    forward_grid(&dense_field(gamma, n_max), layout, &QuadSpec::default()).expect("forward").0
}
