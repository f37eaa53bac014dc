//! Binary field-dump format (QPSF).
//!
//! Little-endian layout:
//!
//! ```text
//! magic   4 bytes  "QPSF"
//! n       u32      samples per axis (even, 8..=65536)
//! hw      f64      grid half-width in wavelengths (finite, > 0)
//! vx      n*n * 2 f64   row-major, interleaved (re, im); rows walk y
//! vy      n*n * 2 f64   likewise
//! ```
//!
//! The reader validates the header before allocating and reads one row at a
//! time, so malformed or truncated inputs fail cleanly without large
//! allocations.

use crate::error::Error;
use crate::grid::{Grid, VectorField};
use ndarray::Array2;
use num_complex::Complex64;
use std::io::{Read, Write};
use thiserror::Error as ThisError;

pub const QPSF_MAGIC: &[u8; 4] = b"QPSF";
/// Largest grid size the reader will accept.
pub const QPSF_MAX_N: u32 = 65_536;

#[derive(Debug, ThisError)]
pub enum QpsfError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic: not a QPSF field dump")]
    BadMagic,
    #[error("unsupported grid size {0}: must be even and in 8..=65536")]
    BadSize(u32),
    #[error("invalid half-width {0}: must be finite and positive")]
    BadHalfWidth(f64),
    #[error("invalid field value at sample {0}")]
    BadValue(usize),
}

impl From<Error> for QpsfError {
    fn from(e: Error) -> Self {
        match e {
            Error::BadGridSize(n) => QpsfError::BadSize(n as u32),
            Error::BadHalfWidth(h) => QpsfError::BadHalfWidth(h),
            other => QpsfError::Io(std::io::Error::other(other.to_string())),
        }
    }
}

/// Serialize a field dump.
pub fn write_qpsf<W: Write>(f: &VectorField, mut w: W) -> std::io::Result<()> {
    w.write_all(QPSF_MAGIC)?;
    w.write_all(&(f.grid().n() as u32).to_le_bytes())?;
    w.write_all(&f.grid().half_width().to_le_bytes())?;
    for comp in [f.vx(), f.vy()] {
        for v in comp.iter() {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_component<R: Read>(r: &mut R, n: usize) -> Result<Array2<Complex64>, QpsfError> {
    let mut out = Array2::zeros((n, n));
    let mut row = vec![0u8; n * 16];
    for iy in 0..n {
        r.read_exact(&mut row)?;
        for ix in 0..n {
            let re = f64::from_le_bytes(row[ix * 16..ix * 16 + 8].try_into().unwrap());
            let im = f64::from_le_bytes(row[ix * 16 + 8..ix * 16 + 16].try_into().unwrap());
            if !re.is_finite() || !im.is_finite() {
                return Err(QpsfError::BadValue(iy * n + ix));
            }
            out[[iy, ix]] = Complex64::new(re, im);
        }
    }
    Ok(out)
}

/// Deserialize a field dump, validating the header and every sample.
pub fn read_qpsf<R: Read>(mut r: R) -> Result<VectorField, QpsfError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != QPSF_MAGIC {
        return Err(QpsfError::BadMagic);
    }
    let mut n_buf = [0u8; 4];
    r.read_exact(&mut n_buf)?;
    let n = u32::from_le_bytes(n_buf);
    if n < 8 || n % 2 != 0 || n > QPSF_MAX_N {
        return Err(QpsfError::BadSize(n));
    }
    let mut hw_buf = [0u8; 8];
    r.read_exact(&mut hw_buf)?;
    let half_width = f64::from_le_bytes(hw_buf);
    if !half_width.is_finite() || half_width <= 0.0 {
        return Err(QpsfError::BadHalfWidth(half_width));
    }
    let grid = Grid::new(n as usize, half_width)?;
    let vx = read_component(&mut r, n as usize)?;
    let vy = read_component(&mut r, n as usize)?;
    Ok(VectorField::from_components(grid, vx, vy)?)
}
