//! Flat binary grid snapshots.
//!
//! Layout, little-endian: `b"QCF"`, kind `u8`, `N: u32`, centre `re, im: f64`,
//! `half_width: f64`, then `N * N` samples as `re, im: f64` in row-major
//! order. A `<path>.meta` text record carries the same header fields plus
//! caller-supplied entries.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::numeric::grid::Grid2D;
use crate::numeric::scalar::Real;

pub const MAGIC: &[u8; 3] = b"QCF";
pub const HEADER_LEN: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum SnapshotKind {
    Dilatation = 1,
    Map = 2,
    Density = 3,
}

impl SnapshotKind {
    fn from_u8(b: u8) -> Result<Self> {
        match b {
            1 => Ok(Self::Dilatation),
            2 => Ok(Self::Map),
            3 => Ok(Self::Density),
            _ => Err(Error::Format(format!("unknown snapshot kind {b}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Dilatation => "dilatation",
            Self::Map => "map",
            Self::Density => "density",
        }
    }
}

pub fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// Writes the grid and its sidecar; `extra` entries must already be valid TOML values.
pub fn write_snapshot<T: Real>(path: &Path, kind: SnapshotKind, grid: &Grid2D<T>, extra: &[(&str, String)]) -> Result<()> {
    let n = u32::try_from(grid.n()).map_err(|_| Error::Format("grid too large".into()))?;
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&[kind as u8])?;
    w.write_all(&n.to_le_bytes())?;
    for v in [grid.center().re.f64(), grid.center().im.f64(), grid.half_width().f64()] {
        w.write_all(&v.to_le_bytes())?;
    }
    for v in grid.values() {
        w.write_all(&v.re.f64().to_le_bytes())?;
        w.write_all(&v.im.f64().to_le_bytes())?;
    }
    w.flush()?;
    let mut meta = format!(
        "kind = \"{}\"\nn = {}\ncenter_re = {:?}\ncenter_im = {:?}\nhalf_width = {:?}\nscalar = \"{}\"\n",
        kind.name(),
        n,
        grid.center().re.f64(),
        grid.center().im.f64(),
        grid.half_width().f64(),
        T::NAME
    );
    for (k, v) in extra {
        meta.push_str(&format!("{k} = {v}\n"));
    }
    fs::write(meta_path(path), meta)?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<(SnapshotKind, Grid2D<f64>)> {
    let mut bytes = vec![];
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < HEADER_LEN || &bytes[..3] != MAGIC {
        return Err(Error::Format(format!("{} is not a grid snapshot", path.display())));
    }
    let kind = SnapshotKind::from_u8(bytes[3])?;
    let n = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
    let f = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let (cre, cim, hw) = (f(8), f(16), f(24));
    if bytes.len() != HEADER_LEN + 16 * n * n {
        return Err(Error::Format(format!("snapshot length {} does not match N = {n}", bytes.len())));
    }
    let values = (0..n * n).map(|k| Complex::new(f(HEADER_LEN + 16 * k), f(HEADER_LEN + 16 * k + 8))).collect();
    let grid = Grid2D::zeros(Complex::new(cre, cim), hw, n)?.with_values(values)?;
    Ok((kind, grid))
}
