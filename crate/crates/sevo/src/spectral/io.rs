//! Field snapshots: a small binary format for full grids and CSV slices
//! for quick plotting.
//!
//! Binary layout, all little-endian: magic "SEVF", u32 version, u32 dim,
//! u32 points per axis, f64 half length, u64 sample count, then the real
//! grid samples as f64 in row-major order.

use super::{SpectralField, SpectralGrid};
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

const MAGIC: &[u8; 4] = b"SEVF";
const VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct FieldSnapshot {
    pub dim: u32,
    pub size: u32,
    pub half_length: f64,
    pub samples: Vec<f64>,
}

impl FieldSnapshot {
    pub fn into_field(self) -> Result<SpectralField, super::SpectralError> {
        let grid = SpectralGrid::new(self.dim as usize, self.size as usize, self.half_length)?;
        SpectralField::from_real(&grid, &self.samples)
    }
}

pub fn write_field(path: &Path, field: &SpectralField) -> io::Result<()> {
    let grid = field.grid();
    let samples = field.to_real();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    w.write_all(&(grid.size() as u32).to_le_bytes())?;
    w.write_all(&grid.half_length().to_le_bytes())?;
    w.write_all(&(samples.len() as u64).to_le_bytes())?;
    for v in &samples {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()
}

fn bad(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

pub fn read_field(path: &Path) -> io::Result<FieldSnapshot> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(bad("not a field snapshot (bad magic)"));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != VERSION {
        return Err(bad(format!("unsupported snapshot version {version}")));
    }
    r.read_exact(&mut b4)?;
    let dim = u32::from_le_bytes(b4);
    r.read_exact(&mut b4)?;
    let size = u32::from_le_bytes(b4);
    r.read_exact(&mut b8)?;
    let half_length = f64::from_le_bytes(b8);
    r.read_exact(&mut b8)?;
    let count = u64::from_le_bytes(b8) as usize;
    if count != (size as usize).pow(dim) {
        return Err(bad("sample count does not match grid shape"));
    }
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        r.read_exact(&mut b8)?;
        samples.push(f64::from_le_bytes(b8));
    }
    Ok(FieldSnapshot {
        dim,
        size,
        half_length,
        samples,
    })
}

/// Write a 1-D slice through the center of the box as CSV (x, value).
/// In 2-D/3-D the slice varies the first axis with the others at N/2.
pub fn write_center_slice_csv(path: &Path, field: &SpectralField) -> io::Result<()> {
    let grid: &Arc<SpectralGrid> = field.grid();
    let samples = field.to_real();
    let xs = grid.axis_coords();
    let n = grid.size();
    let stride = n.pow((grid.dim() - 1) as u32);
    // Offset of the center point in the trailing axes.
    let mut offset = 0usize;
    let mut mult = 1usize;
    for _ in 1..grid.dim() {
        offset += (n / 2) * mult;
        mult *= n;
    }
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,value")?;
    for (j, &x) in xs.iter().enumerate() {
        writeln!(w, "{},{}", x, samples[j * stride + offset])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralGrid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.sevf");
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let g = SpectralGrid::new(2, 16, 3.0).unwrap();
        let samples: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-2.0..2.0)).collect();
        let f = SpectralField::from_real(&g, &samples).unwrap();
        write_field(&path, &f).unwrap();
        let snap = read_field(&path).unwrap();
        assert_eq!(snap.dim, 2);
        assert_eq!(snap.size, 16);
        assert_eq!(snap.half_length, 3.0);
        let back = snap.into_field().unwrap().to_real();
        for (a, b) in samples.iter().zip(back.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.bin");
        std::fs::write(&path, b"NOPE12345678").unwrap();
        assert!(read_field(&path).is_err());
    }

    #[test]
    fn center_slice_has_header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("slice.csv");
        let g = SpectralGrid::new(2, 8, 1.0).unwrap();
        let samples: Vec<f64> = (0..g.len()).map(|i| i as f64).collect();
        let f = SpectralField::from_real(&g, &samples).unwrap();
        write_center_slice_csv(&path, &f).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,value");
        assert_eq!(lines.len(), 9);
        // row j of the slice is sample j*8 + 4
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first[0], "-1");
        assert!((first[1].parse::<f64>().unwrap() - 4.0).abs() < 1e-9);
    }
}
