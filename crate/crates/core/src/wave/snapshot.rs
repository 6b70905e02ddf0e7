//! Binary field dumps.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4     | magic `PWLF` |
//! | 4     | format version (u32, currently 1) |
//! | 4     | dims (u32) |
//! | 8*dims | point count per axis (u64) |
//! | 8*dims | spacing per axis (f64) |
//! | 8*dims | first sample coordinate per axis (f64) |
//! | 8     | time (f64) |
//! | 16*N  | amplitudes as (re, im) f64 pairs, row-major, particle axis slowest |
//!
//! A JSON sidecar with the same metadata sits next to the dump.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::field::WaveField;
use super::grid::{Axis, Grid};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"PWLF";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub format_version: u32,
    pub byte_order: String,
    pub layout: String,
    pub dims: usize,
    pub points: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
    pub masses: Vec<f64>,
    pub hbar: f64,
    pub dt: f64,
    pub time: f64,
    pub norm: f64,
    pub data_file: String,
}

pub fn encode(field: &WaveField) -> Vec<u8> {
    let axes = &field.grid.axes;
    let mut out = Vec::with_capacity(32 + 24 * axes.len() + 16 * field.amps.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(axes.len() as u32).to_le_bytes());
    for a in axes {
        out.extend_from_slice(&(a.points as u64).to_le_bytes());
    }
    for a in axes {
        out.extend_from_slice(&a.dx().to_le_bytes());
    }
    for a in axes {
        out.extend_from_slice(&a.start().to_le_bytes());
    }
    out.extend_from_slice(&field.time.to_le_bytes());
    for v in &field.amps {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

struct Cursor<'a>(&'a [u8]);

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        if self.0.len() < N {
            return Err(Error::Config("truncated snapshot".into()));
        }
        let (h, t) = self.0.split_at(N);
        self.0 = t;
        Ok(h.try_into().expect("length checked"))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

/// Decodes a dump. Masses, `hbar` and `dt` are not part of the binary
/// header and are taken from `meta` when given, otherwise set to 1.
pub fn decode(bytes: &[u8], meta: Option<&SnapshotMeta>) -> Result<WaveField> {
    let mut c = Cursor(bytes);
    if &c.take::<4>()? != MAGIC {
        return Err(Error::Config("not a field snapshot".into()));
    }
    let version = c.u32()?;
    if version != VERSION {
        return Err(Error::Config(format!("unsupported snapshot version {version}")));
    }
    let dims = c.u32()? as usize;
    if !(1..=2).contains(&dims) {
        return Err(Error::Config(format!("snapshot has {dims} dims")));
    }
    let points: Vec<usize> = (0..dims).map(|_| c.u64().map(|v| v as usize)).collect::<Result<_>>()?;
    let spacing: Vec<f64> = (0..dims).map(|_| c.f64()).collect::<Result<_>>()?;
    let _origin: Vec<f64> = (0..dims).map(|_| c.f64()).collect::<Result<_>>()?;
    let time = c.f64()?;
    let axes = (0..dims)
        .map(|i| {
            let mass = meta.map_or(1.0, |m| m.masses[i]);
            Axis::new(points[i], spacing[i] * points[i] as f64, mass)
        })
        .collect::<Result<Vec<_>>>()?;
    let grid = Grid::new(axes, meta.map_or(1.0, |m| m.dt), meta.map_or(1.0, |m| m.hbar))?;
    let n = grid.len();
    let mut amps = Vec::with_capacity(n);
    for _ in 0..n {
        amps.push(C64::new(c.f64()?, c.f64()?));
    }
    Ok(WaveField { grid, amps, time })
}

pub fn meta_for(field: &WaveField, data_file: &str) -> SnapshotMeta {
    let axes = &field.grid.axes;
    SnapshotMeta {
        format_version: VERSION,
        byte_order: "little-endian".into(),
        layout: "row-major, particle axis slowest, (re, im) f64 pairs".into(),
        dims: axes.len(),
        points: axes.iter().map(|a| a.points).collect(),
        spacing: axes.iter().map(|a| a.dx()).collect(),
        origin: axes.iter().map(|a| a.start()).collect(),
        masses: axes.iter().map(|a| a.mass).collect(),
        hbar: field.grid.hbar,
        dt: field.grid.dt,
        time: field.time,
        norm: field.norm_sqr(),
        data_file: data_file.into(),
    }
}

/// Writes `<stem>.bin` and `<stem>.json` into `dir`; returns both paths.
pub fn write_snapshot(field: &WaveField, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    let bin = dir.join(format!("{stem}.bin"));
    let json = dir.join(format!("{stem}.json"));
    fs::File::create(&bin)?.write_all(&encode(field))?;
    let meta = meta_for(field, &format!("{stem}.bin"));
    fs::write(&json, serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok((bin, json))
}

pub fn read_snapshot(json_path: &Path) -> Result<WaveField> {
    let meta: SnapshotMeta = serde_json::from_str(&fs::read_to_string(json_path)?)?;
    let dir = json_path.parent().unwrap_or_else(|| Path::new("."));
    let mut bytes = Vec::new();
    fs::File::open(dir.join(&meta.data_file))?.read_to_end(&mut bytes)?;
    decode(&bytes, Some(&meta))
}
