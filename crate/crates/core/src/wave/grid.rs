use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 64;
/// Required ratio between the grid's Nyquist momentum and the largest
/// momentum present in the field.
pub const BAND_MARGIN: f64 = 4.0;

/// One periodic axis. Sample `i` sits at `-extent/2 + i*dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub points: usize,
    pub extent: f64,
    pub mass: f64,
}

impl Axis {
    pub fn new(points: usize, extent: f64, mass: f64) -> Result<Self> {
        if points < MIN_POINTS || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "point count {points} must be a power of two >= {MIN_POINTS}"
            )));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::InvalidGrid(format!("extent {extent} must be positive")));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidGrid(format!("mass {mass} must be positive")));
        }
        Ok(Self { points, extent, mass })
    }

    pub fn dx(&self) -> f64 {
        self.extent / self.points as f64
    }

    pub fn start(&self) -> f64 {
        -0.5 * self.extent
    }

    pub fn x(&self, i: usize) -> f64 {
        self.start() + i as f64 * self.dx()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.x(i)).collect()
    }

    pub fn dk(&self) -> f64 {
        2.0 * PI / self.extent
    }

    /// Nyquist wavenumber.
    pub fn k_max(&self) -> f64 {
        PI / self.dx()
    }

    /// Wavenumbers in FFT storage order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.points;
        let dk = self.dk();
        (0..n)
            .map(|i| if i < n / 2 { i as f64 * dk } else { (i as f64 - n as f64) * dk })
            .collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.start() && x < self.start() + self.extent
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub axes: Vec<Axis>,
    pub dt: f64,
    pub hbar: f64,
}

impl Grid {
    pub fn new(axes: Vec<Axis>, dt: f64, hbar: f64) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidGrid(format!("{} axes; 1 or 2 supported", axes.len())));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidGrid(format!("dt {dt} must be positive")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidGrid(format!("hbar {hbar} must be positive")));
        }
        Ok(Self { axes, dt, hbar })
    }

    /// Grid whose `dt` keeps the band-edge kinetic phase per step below pi/8.
    pub fn with_auto_dt(axes: Vec<Axis>, hbar: f64) -> Result<Self> {
        let dt = stable_dt(&axes, hbar);
        Self::new(axes, dt, hbar)
    }

    pub fn new_1d(points: usize, extent: f64) -> Result<Self> {
        Self::with_auto_dt(vec![Axis::new(points, extent, 1.0)?], 1.0)
    }

    pub fn new_2d(x: Axis, y: Axis) -> Result<Self> {
        Self::with_auto_dt(vec![x, y], 1.0)
    }

    /// 2048 points over 80 length units, unit mass.
    pub fn default_1d() -> Self {
        Self::new_1d(2048, 80.0).expect("valid default grid")
    }

    /// 512 x 512 over 40 x 40, unit particle mass and pointer mass 10.
    pub fn default_2d() -> Self {
        Self::new_2d(
            Axis::new(512, 40.0, 1.0).expect("valid"),
            Axis::new(512, 40.0, 10.0).expect("valid"),
        )
        .expect("valid default grid")
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Volume element `dx` or `dx*dy`.
    pub fn cell(&self) -> f64 {
        self.axes.iter().map(|a| a.dx()).product()
    }

    /// Largest momentum the grid resolves with the required margin.
    pub fn band_limit(&self, axis: usize) -> f64 {
        self.hbar * self.axes[axis].k_max() / BAND_MARGIN
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.axes == other.axes && self.hbar == other.hbar
    }
}

/// Step for which `hbar k_max^2 dt / (2m) < pi/8` on every axis (with a 10% cushion).
pub fn stable_dt(axes: &[Axis], hbar: f64) -> f64 {
    axes.iter()
        .map(|a| 0.9 * (PI / 8.0) * 2.0 * a.mass / (hbar * a.k_max() * a.k_max()))
        .fold(f64::INFINITY, f64::min)
}
