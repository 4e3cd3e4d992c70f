//! Binary field files.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4 | `u32` dimension `n` |
//! | 8 | `f64` half-width `Ξ` |
//! | 8 | `u64` points per axis `N` |
//! | 1 | `u8` 1 if a support scale follows, else 0 |
//! | 0 or 8 | `f64` support scale `λ` |
//! | 16·Nⁿ | `(re, im)` `f64` pairs in row-major grid order |

use std::io::{Read, Write};
use std::path::Path;

use curveprop_core::{FrequencyGrid, SpectralField, C64};

#[derive(Debug, thiserror::Error)]
pub enum FieldFileError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed field file: {0}")]
    Format(String),
    #[error(transparent)]
    Invalid(#[from] curveprop_core::Error),
}

pub fn write_field<W: Write>(mut w: W, field: &SpectralField) -> Result<(), FieldFileError> {
    let g = field.grid();
    w.write_all(&(g.dim() as u32).to_le_bytes())?;
    w.write_all(&g.half_width().to_le_bytes())?;
    w.write_all(&(g.points_per_axis() as u64).to_le_bytes())?;
    match field.support() {
        Some(l) => {
            w.write_all(&[1])?;
            w.write_all(&l.to_le_bytes())?;
        }
        None => w.write_all(&[0])?,
    }
    let mut buf = Vec::with_capacity(16 * field.samples().len());
    for z in field.samples() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

fn read_array<const K: usize, R: Read>(r: &mut R) -> Result<[u8; K], FieldFileError> {
    let mut b = [0u8; K];
    r.read_exact(&mut b)
        .map_err(|e| FieldFileError::Format(format!("truncated header: {e}")))?;
    Ok(b)
}

pub fn read_field<R: Read>(mut r: R) -> Result<SpectralField, FieldFileError> {
    let dim = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let half_width = f64::from_le_bytes(read_array(&mut r)?);
    let points = u64::from_le_bytes(read_array(&mut r)?);
    let flag = read_array::<1, _>(&mut r)?[0];
    let support = match flag {
        0 => None,
        1 => Some(f64::from_le_bytes(read_array(&mut r)?)),
        v => return Err(FieldFileError::Format(format!("support flag must be 0 or 1, got {v}"))),
    };
    if !(1..=3).contains(&dim) {
        return Err(FieldFileError::Format(format!("unsupported dimension {dim}")));
    }
    let count = usize::try_from(points)
        .ok()
        .and_then(|p| p.checked_pow(dim as u32))
        .filter(|&c| c <= 1 << 28)
        .ok_or_else(|| FieldFileError::Format(format!("grid of {points}^{dim} points is too large")))?;
    let grid = FrequencyGrid::new(dim, half_width, points as usize)?;
    let mut bytes = vec![0u8; 16 * count];
    r.read_exact(&mut bytes)
        .map_err(|e| FieldFileError::Format(format!("expected {count} samples: {e}")))?;
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(FieldFileError::Format(format!("{} trailing bytes", rest.len())));
    }
    let fhat = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            C64::new(re, im)
        })
        .collect();
    Ok(SpectralField::new(grid, fhat, support)?)
}

pub fn save_field(path: &Path, field: &SpectralField) -> Result<(), FieldFileError> {
    let mut bytes = Vec::new();
    write_field(&mut bytes, field)?;
    crate::report::write_atomic(path, &bytes)?;
    Ok(())
}

pub fn load_field(path: &Path) -> Result<SpectralField, FieldFileError> {
    let f = std::fs::File::open(path)?;
    read_field(std::io::BufReader::new(f))
}
