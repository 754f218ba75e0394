//! Field dumps.
//!
//! Binary layout (little endian): the magic `TSL1`, `u32 nx`, `u32 ny`,
//! `f64 lx`, `f64 ly`, then `nx * ny` pairs of `f64 (re, im)` in row-major
//! order with rows running along x.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexField2D, TransverseGrid};

pub const MAGIC: &[u8; 4] = b"TSL1";

pub fn write_field<W: Write>(mut w: W, field: &ComplexField2D) -> Result<()> {
    let g = field.grid();
    w.write_all(MAGIC)?;
    w.write_all(&(g.nx() as u32).to_le_bytes())?;
    w.write_all(&(g.ny() as u32).to_le_bytes())?;
    w.write_all(&g.lx().to_le_bytes())?;
    w.write_all(&g.ly().to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * g.len());
    for v in field.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<ComplexField2D> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Format("truncated header".into()))?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let mut u = [0u8; 4];
    let mut f = [0u8; 8];
    let mut next_u32 = |r: &mut R| -> Result<u32> {
        r.read_exact(&mut u).map_err(|_| Error::Format("truncated header".into()))?;
        Ok(u32::from_le_bytes(u))
    };
    let nx = next_u32(&mut r)? as usize;
    let ny = next_u32(&mut r)? as usize;
    let mut next_f64 = |r: &mut R| -> Result<f64> {
        r.read_exact(&mut f).map_err(|_| Error::Format("truncated data".into()))?;
        Ok(f64::from_le_bytes(f))
    };
    let lx = next_f64(&mut r)?;
    let ly = next_f64(&mut r)?;
    let grid = TransverseGrid::new(nx, ny, lx, ly)?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = next_f64(&mut r)?;
        let im = next_f64(&mut r)?;
        values.push(Complex64::new(re, im));
    }
    if r.read(&mut [0u8; 1])? != 0 {
        return Err(Error::Format("trailing bytes after field data".into()));
    }
    ComplexField2D::from_values(grid, values)
}

pub fn save_field(path: impl AsRef<Path>, field: &ComplexField2D) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_field(std::io::BufWriter::new(file), field)
}

pub fn load_field(path: impl AsRef<Path>) -> Result<ComplexField2D> {
    let file = std::fs::File::open(path)?;
    read_field(std::io::BufReader::new(file))
}

/// Plot-friendly export: header `x,y,re,im`, one sample per line.
pub fn write_field_csv<W: Write>(mut w: W, field: &ComplexField2D) -> Result<()> {
    writeln!(w, "x,y,re,im")?;
    let g = field.grid();
    for (idx, v) in field.values().iter().enumerate() {
        let (x, y) = g.position(idx);
        writeln!(w, "{x},{y},{},{}", v.re, v.im)?;
    }
    Ok(())
}
