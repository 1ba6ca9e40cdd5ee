use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::field::Field2D;
use super::grid::GridSpec;
use crate::error::{Error, Result};

pub const ILF2_MAGIC: &[u8; 4] = b"ILF2";
pub const ILF2_VERSION: u32 = 1;

/// Writes the ILF2 layout: magic, `u32` version, `f64` half width,
/// `u32` resolution, then `N²` samples, all little endian, row-major.
pub fn write_field_to<W: Write>(mut w: W, f: &Field2D) -> Result<()> {
    let g = f.grid();
    w.write_all(ILF2_MAGIC)?;
    w.write_all(&ILF2_VERSION.to_le_bytes())?;
    w.write_all(&g.half_width().to_le_bytes())?;
    w.write_all(&(g.n() as u32).to_le_bytes())?;
    for v in f.physical() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_field_from<R: Read>(mut r: R) -> Result<Field2D> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != ILF2_MAGIC {
        return Err(Error::Format("bad magic, not an ILF2 file".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != ILF2_VERSION {
        return Err(Error::Format(format!("unsupported ILF2 version {version}")));
    }
    r.read_exact(&mut b8)?;
    let half_width = f64::from_le_bytes(b8);
    r.read_exact(&mut b4)?;
    let n = u32::from_le_bytes(b4) as usize;
    let grid = GridSpec::new(half_width, n).map_err(|e| Error::Format(e.to_string()))?;
    let mut samples = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        r.read_exact(&mut b8)?;
        samples.push(f64::from_le_bytes(b8));
    }
    Field2D::from_physical(grid, samples).map_err(|e| Error::Format(e.to_string()))
}

pub fn write_field(path: impl AsRef<Path>, f: &Field2D) -> Result<()> {
    write_field_to(BufWriter::new(File::create(path)?), f)
}

pub fn read_field(path: impl AsRef<Path>) -> Result<Field2D> {
    read_field_from(BufReader::new(File::open(path)?))
}
