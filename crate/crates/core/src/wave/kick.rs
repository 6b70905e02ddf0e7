//! Impulsive particle-pointer coupling.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::field::WaveField;
use super::grid::Axis;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignRule {
    /// Pointer gets `+k` while the particle is in the region, nothing otherwise.
    PlusOnRegion,
    /// Pointer gets `+k` inside the region and `-k` outside.
    PlusMinusSplit,
}

impl SignRule {
    /// Momentum multiplier for a particle inside / outside the region.
    pub fn signs(self) -> (f64, f64) {
        match self {
            SignRule::PlusOnRegion => (1.0, 0.0),
            SignRule::PlusMinusSplit => (1.0, -1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KickSpec {
    pub k: f64,
    /// Half-open particle-axis interval `[lo, hi)`; either end may be infinite.
    pub region: (f64, f64),
    pub sign_rule: SignRule,
    pub t_apply: f64,
}

impl KickSpec {
    /// Per-cell membership of the particle axis in the region.
    ///
    /// Ends are snapped to the nearest cell boundary (midpoint between
    /// samples), so a cell is inside when its sample lies in the snapped
    /// interval.
    pub fn mask(&self, axis: &Axis) -> Result<Vec<bool>> {
        let (lo, hi) = self.region;
        if !(self.k >= 0.0) {
            return Err(Error::NegativeKick(self.k));
        }
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::RegionMisaligned { lo, hi });
        }
        let dx = axis.dx();
        let snap = |v: f64| {
            if v.is_finite() {
                axis.start() + ((v - axis.start()) / dx - 0.5).round() * dx + 0.5 * dx
            } else {
                v
            }
        };
        let (slo, shi) = (snap(lo), snap(hi));
        let end = axis.start() + axis.extent;
        if (lo.is_finite() && lo > end) || (hi.is_finite() && hi < axis.start()) {
            return Err(Error::RegionMisaligned { lo, hi });
        }
        let mask: Vec<bool> = (0..axis.points).map(|i| axis.x(i) >= slo && axis.x(i) < shi).collect();
        if !mask.iter().any(|&m| m) {
            return Err(Error::RegionMisaligned { lo, hi });
        }
        Ok(mask)
    }

    /// Momentum given to the pointer for each particle-axis cell.
    pub fn momenta(&self, axis: &Axis) -> Result<Vec<f64>> {
        let (inside, outside) = self.sign_rule.signs();
        Ok(self.mask(axis)?.into_iter().map(|m| self.k * if m { inside } else { outside }).collect())
    }
}

/// `psi(x, y) <- psi(x, y) exp(i s(x) k y / hbar)`.
pub fn apply_kick(field: &WaveField, kick: &KickSpec) -> Result<WaveField> {
    if field.dims() != 2 {
        return Err(Error::WrongDimension { expected: 2, got: field.dims() });
    }
    let (ax, ay) = (field.grid.axes[0], field.grid.axes[1]);
    let momenta = kick.momenta(&ax)?;
    let hbar = field.grid.hbar;
    let ny = ay.points;
    let mut out = field.clone();
    for (ix, p) in momenta.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        for iy in 0..ny {
            out.amps[ix * ny + iy] *= C64::from_polar(1.0, p * ay.x(iy) / hbar);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationTime {
    Finite(f64),
    Never,
}

impl SeparationTime {
    pub fn value(self) -> f64 {
        match self {
            SeparationTime::Finite(t) => t,
            SeparationTime::Never => f64::INFINITY,
        }
    }
}

/// `tau = M sigma_y / k`: the time for a kicked pointer to move by its own width.
pub fn pointer_separation_time(k: f64, mass: f64, sigma_y: f64) -> Result<SeparationTime> {
    if k < 0.0 || k.is_nan() {
        return Err(Error::NegativeKick(k));
    }
    if k == 0.0 {
        return Ok(SeparationTime::Never);
    }
    Ok(SeparationTime::Finite(mass * sigma_y / k))
}

/// Smallest branch weight that can be conditioned on.
pub const MIN_BRANCH_WEIGHT: f64 = 1e-9;

/// Total-variation distance between two unnormalized densities on a common
/// uniform grid with spacing `dy`, after normalizing each.
pub fn tv_distance(p: &[f64], q: &[f64], dy: f64) -> Result<f64> {
    let (sp, sq) = (p.iter().sum::<f64>() * dy, q.iter().sum::<f64>() * dy);
    if sp < MIN_BRANCH_WEIGHT {
        return Err(Error::BranchTooSmall(sp));
    }
    if sq < MIN_BRANCH_WEIGHT {
        return Err(Error::BranchTooSmall(sq));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a / sp - b / sq).abs()).sum::<f64>() * dy)
}

/// Total-variation distance between the pointer marginals conditioned on the
/// particle being inside and outside `region`.
pub fn branch_distinguishability(field: &WaveField, region: (f64, f64)) -> Result<f64> {
    if field.dims() != 2 {
        return Err(Error::WrongDimension { expected: 2, got: field.dims() });
    }
    let (ax, ay) = (field.grid.axes[0], field.grid.axes[1]);
    let probe = KickSpec { k: 0.0, region, sign_rule: SignRule::PlusOnRegion, t_apply: 0.0 };
    let mask = probe.mask(&ax)?;
    let ny = ay.points;
    let (mut inside, mut outside) = (vec![0.0; ny], vec![0.0; ny]);
    for (ix, m) in mask.iter().enumerate() {
        let target = if *m { &mut inside } else { &mut outside };
        for iy in 0..ny {
            target[iy] += field.amps[ix * ny + iy].norm_sqr() * ax.dx();
        }
    }
    tv_distance(&inside, &outside, ay.dx())
}
