//! Binary PGM (P5) output of sample magnitudes, one row per first grid index.

use std::io::Write;

use hyperxray::Complex64;

use crate::error::CliError;

pub fn write_pgm<W: Write>(mut w: W, rows: usize, cols: usize, values: &[Complex64]) -> Result<(), CliError> {
    if rows * cols != values.len() || rows == 0 || cols == 0 {
        return Err(CliError::Input(format!("{} values do not fill a {rows}x{cols} image", values.len())));
    }
    let max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let scale = if max > 0.0 { 255.0 / max } else { 0.0 };
    write!(w, "P5\n{cols} {rows}\n255\n")?;
    let bytes: Vec<u8> = values.iter().map(|v| (v.norm() * scale).round().clamp(0.0, 255.0) as u8).collect();
    w.write_all(&bytes)?;
    Ok(())
}
