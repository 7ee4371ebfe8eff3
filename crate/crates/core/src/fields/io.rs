//! Binary field container and CSV slice export.
//!
//! Container layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 8 | magic `PSPNFLD1` |
//! | 4 | format version (u32, currently 1) |
//! | 1 | domain: 0 position, 1 momentum |
//! | 1 | layout: 0 row-major (x slowest, z fastest) |
//! | 2 | reserved, zero |
//! | 4 | n (u32) |
//! | 4 | components per node (u32) |
//! | 8 | dx (f64) |
//! | 8 | time (f64) |
//!
//! followed by `n³ × components` complex values stored as interleaved
//! (re, im) f64 pairs, components of one node contiguous.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::grid::GridSpec;
use crate::fields::spectral::{PositionField, SpectralField};
use crate::vector::Spinor;

pub const MAGIC: [u8; 8] = *b"PSPNFLD1";
pub const VERSION: u32 = 1;
pub const HEADER_BYTES: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Position,
    Momentum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldContainer {
    pub domain: Domain,
    pub grid: GridSpec,
    pub time: f64,
    pub components: usize,
    pub data: Vec<Complex64>,
}

impl FieldContainer {
    fn from_spinors(domain: Domain, grid: GridSpec, time: f64, nodes: &[Spinor]) -> Self {
        FieldContainer {
            domain,
            grid,
            time,
            components: 6,
            data: nodes.iter().flatten().copied().collect(),
        }
    }

    fn spinors(&self, want: Domain) -> Result<Vec<Spinor>> {
        if self.domain != want {
            return Err(Error::Format(format!("container holds a {:?} field", self.domain)));
        }
        if self.components != 6 {
            return Err(Error::Format(format!(
                "expected 6 components, found {}",
                self.components
            )));
        }
        Ok(self
            .data
            .chunks_exact(6)
            .map(|c| std::array::from_fn(|i| c[i]))
            .collect())
    }

    pub fn to_spectral(&self) -> Result<SpectralField> {
        SpectralField::from_nodes(self.grid, self.spinors(Domain::Momentum)?, self.time)
    }

    pub fn to_position(&self) -> Result<PositionField> {
        PositionField::from_nodes(self.grid, self.spinors(Domain::Position)?, self.time)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let mut header = Vec::with_capacity(HEADER_BYTES);
        header.extend_from_slice(&MAGIC);
        header.extend_from_slice(&VERSION.to_le_bytes());
        header.push(match self.domain {
            Domain::Position => 0,
            Domain::Momentum => 1,
        });
        header.push(0);
        header.extend_from_slice(&[0, 0]);
        header.extend_from_slice(&(self.grid.n() as u32).to_le_bytes());
        header.extend_from_slice(&(self.components as u32).to_le_bytes());
        header.extend_from_slice(&self.grid.dx().to_le_bytes());
        header.extend_from_slice(&self.time.to_le_bytes());
        w.write_all(&header)?;
        let mut body = Vec::with_capacity(self.data.len() * 16);
        for z in &self.data {
            body.extend_from_slice(&z.re.to_le_bytes());
            body.extend_from_slice(&z.im.to_le_bytes());
        }
        w.write_all(&body)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut h = [0u8; HEADER_BYTES];
        r.read_exact(&mut h)
            .map_err(|_| Error::Format("truncated header".into()))?;
        if h[..8] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(h[o..o + 4].try_into().unwrap());
        let f64_at = |o: usize| f64::from_le_bytes(h[o..o + 8].try_into().unwrap());
        let version = u32_at(8);
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let domain = match h[12] {
            0 => Domain::Position,
            1 => Domain::Momentum,
            d => return Err(Error::Format(format!("unknown domain {d}"))),
        };
        if h[13] != 0 {
            return Err(Error::Format(format!("unknown layout {}", h[13])));
        }
        let grid = GridSpec::new(u32_at(16) as usize, f64_at(24)).map_err(|e| Error::Format(e.to_string()))?;
        let components = u32_at(20) as usize;
        let time = f64_at(32);
        let count = grid.nodes() * components;
        let mut body = vec![0u8; count * 16];
        r.read_exact(&mut body)
            .map_err(|_| Error::Format("truncated data".into()))?;
        let data = body
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        Ok(FieldContainer {
            domain,
            grid,
            time,
            components,
            data,
        })
    }
}

impl From<&SpectralField> for FieldContainer {
    fn from(f: &SpectralField) -> Self {
        FieldContainer::from_spinors(Domain::Momentum, *f.grid(), f.time, f.nodes())
    }
}

impl From<&PositionField> for FieldContainer {
    fn from(f: &PositionField) -> Self {
        FieldContainer::from_spinors(Domain::Position, *f.grid(), f.time, f.nodes())
    }
}

/// A 1-D line or 2-D plane through the grid, by storage index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Slice {
    /// Nodes varying along `axis`, other indices taken from `through`.
    Line { axis: usize, through: [usize; 3] },
    /// Nodes with index `index` on `normal`.
    Plane { normal: usize, index: usize },
}

impl Slice {
    /// Linear node indices in output order.
    pub fn nodes(&self, grid: &GridSpec) -> Result<Vec<usize>> {
        let n = grid.n();
        match *self {
            Slice::Line { axis, through } => {
                if axis > 2 || through.iter().any(|&t| t >= n) {
                    return Err(Error::InvalidGrid(format!("line {self:?} outside grid")));
                }
                Ok((0..n)
                    .map(|t| {
                        let mut u = through;
                        u[axis] = t;
                        grid.linear(u[0], u[1], u[2])
                    })
                    .collect())
            }
            Slice::Plane { normal, index } => {
                if normal > 2 || index >= n {
                    return Err(Error::InvalidGrid(format!("plane {self:?} outside grid")));
                }
                let mut out = Vec::with_capacity(n * n);
                for a in 0..n {
                    for b in 0..n {
                        let u = match normal {
                            0 => [index, a, b],
                            1 => [a, index, b],
                            _ => [a, b, index],
                        };
                        out.push(grid.linear(u[0], u[1], u[2]));
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Write selected nodal columns on a slice as CSV with coordinate columns
/// (x,y,z for position, kx,ky,kz for momentum).
pub fn write_slice_csv<W: Write>(
    w: W,
    grid: &GridSpec,
    domain: Domain,
    slice: &Slice,
    columns: &[(&str, &[f64])],
) -> Result<()> {
    for (name, v) in columns {
        if v.len() != grid.nodes() {
            return Err(Error::Format(format!("column {name} has {} values", v.len())));
        }
    }
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    let mut out = csv::Writer::from_writer(w);
    let coords: [&str; 3] = match domain {
        Domain::Position => ["x", "y", "z"],
        Domain::Momentum => ["kx", "ky", "kz"],
    };
    let header: Vec<&str> = coords.iter().copied().chain(columns.iter().map(|c| c.0)).collect();
    out.write_record(&header).map_err(csv_err)?;
    for idx in slice.nodes(grid)? {
        let pos = match domain {
            Domain::Position => grid.x_at(idx),
            Domain::Momentum => grid.k_at(idx),
        };
        let row: Vec<String> = pos
            .iter()
            .copied()
            .chain(columns.iter().map(|c| c.1[idx]))
            .map(|v| format!("{v:.16e}"))
            .collect();
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn container_round_trip() {
        let g = GridSpec::new(8, 0.25).unwrap();
        let f = SpectralField::from_fn(g, |k| std::array::from_fn(|i| Complex64::new(k[0] + i as f64, k[2])));
        let mut buf = Vec::new();
        FieldContainer::from(&f).write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), HEADER_BYTES + g.nodes() * 6 * 16);
        let back = FieldContainer::read_from(buf.as_slice()).unwrap();
        assert_eq!(back.to_spectral().unwrap(), f);
        assert!(back.to_position().is_err());
    }

    #[test]
    fn corrupt_input_rejected() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let mut buf = Vec::new();
        FieldContainer::from(&SpectralField::zeros(g))
            .write_to(&mut buf)
            .unwrap();
        assert!(FieldContainer::read_from(&buf[..100]).is_err());
        buf[0] = b'X';
        assert!(FieldContainer::read_from(buf.as_slice()).is_err());
    }

    #[test]
    fn csv_line_slice() {
        let g = GridSpec::new(8, 0.5).unwrap();
        let v: Vec<f64> = (0..g.nodes()).map(|i| i as f64).collect();
        let mut out = Vec::new();
        let slice = Slice::Line {
            axis: 2,
            through: [4, 4, 0],
        };
        write_slice_csv(&mut out, &g, Domain::Position, &slice, &[("density", &v)]).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,y,z,density");
        assert_eq!(lines.len(), 9);
        let first: Vec<f64> = lines[1].split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(first, vec![0.0, 0.0, -2.0, g.linear(4, 4, 0) as f64]);
        let plane = Slice::Plane { normal: 0, index: 3 };
        assert_eq!(plane.nodes(&g).unwrap().len(), 64);
    }
}
