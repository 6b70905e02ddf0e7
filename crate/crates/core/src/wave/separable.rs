//! Wave functions stored as a short sum of product branches
//! `sum_b w_b f_b(x) g_b(y)`.
//!
//! Free evolution acts on each factor separately, so every branch is
//! propagated exactly with 1D transforms. An impulsive kick splits each
//! branch into its inside/outside parts; pieces with negligible norm are
//! dropped and their weight is accumulated in `discarded`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::field::{PacketSpec, WaveField};
use super::grid::Grid;
use super::kick::KickSpec;
use super::spectral;
use crate::error::{Error, Result};

/// Squared norm below which a kicked piece is dropped.
pub const PRUNE_NORM_SQR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductBranch {
    pub weight: C64,
    /// One unit-norm factor per axis, sampled on that axis.
    pub factors: Vec<Vec<C64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableField {
    pub grid: Grid,
    pub branches: Vec<ProductBranch>,
    pub time: f64,
    /// Probability removed by pruning.
    pub discarded: f64,
}

fn axis_inner(a: &[C64], b: &[C64], dx: f64) -> C64 {
    a.iter().zip(b).map(|(u, v)| u.conj() * v).sum::<C64>() * dx
}

fn normalize_factor(f: &mut [C64], dx: f64) -> f64 {
    let n = (f.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx).sqrt();
    if n > 0.0 {
        f.iter_mut().for_each(|v| *v /= n);
    }
    n
}

/// Free evolution of a single 1D factor by `dt`, optionally with its derivative.
pub fn evolve_factor(f: &[C64], k: &[f64], mass: f64, hbar: f64, dt: f64, want_derivative: bool) -> (Vec<C64>, Option<Vec<C64>>) {
    let mut s = f.to_vec();
    spectral::forward_1d(&mut s);
    if dt != 0.0 {
        for (v, kk) in s.iter_mut().zip(k) {
            *v *= C64::from_polar(1.0, -hbar * kk * kk * dt / (2.0 * mass));
        }
    }
    let d = want_derivative.then(|| {
        let n = s.len();
        let mut d: Vec<C64> = s
            .iter()
            .zip(k)
            .enumerate()
            .map(|(i, (v, kk))| if i == n / 2 { C64::new(0.0, 0.0) } else { v * C64::new(0.0, *kk) })
            .collect();
        spectral::inverse_1d(&mut d);
        d
    });
    spectral::inverse_1d(&mut s);
    (s, d)
}

impl SeparableField {
    /// Superposition of product Gaussians: each entry of `packets` is a
    /// weight and one packet per axis.
    pub fn from_packets(grid: &Grid, packets: &[(C64, Vec<PacketSpec>)]) -> Result<Self> {
        if packets.is_empty() {
            return Err(Error::Config("no packets".into()));
        }
        let mut branches = Vec::with_capacity(packets.len());
        for (w, specs) in packets {
            if specs.len() != grid.dims() {
                return Err(Error::WrongDimension { expected: grid.dims(), got: specs.len() });
            }
            let mut factors = Vec::new();
            for (axis, s) in specs.iter().enumerate() {
                s.check(grid, axis)?;
                let a = grid.axes[axis];
                let mut f: Vec<C64> = (0..a.points).map(|i| s.amplitude(a.x(i), 0.0, a.mass, grid.hbar)).collect();
                normalize_factor(&mut f, a.dx());
                factors.push(f);
            }
            branches.push(ProductBranch { weight: *w, factors });
        }
        let mut field = Self { grid: grid.clone(), branches, time: 0.0, discarded: 0.0 };
        let n = field.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::Physics("packet superposition vanishes".into()));
        }
        field.branches.iter_mut().for_each(|b| b.weight /= n);
        Ok(field)
    }

    pub fn dims(&self) -> usize {
        self.grid.dims()
    }

    /// `<b|b'>` over all axes.
    pub fn branch_overlap(&self, i: usize, j: usize) -> C64 {
        let (a, b) = (&self.branches[i], &self.branches[j]);
        self.grid
            .axes
            .iter()
            .enumerate()
            .map(|(ax, g)| axis_inner(&a.factors[ax], &b.factors[ax], g.dx()))
            .product()
    }

    pub fn norm_sqr(&self) -> f64 {
        let n = self.branches.len();
        let mut s = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                s += self.branches[i].weight.conj() * self.branches[j].weight * self.branch_overlap(i, j);
            }
        }
        s.re
    }

    /// Exact free evolution of every factor to time `t`.
    pub fn propagate_to(&mut self, t: f64) {
        let dt = t - self.time;
        if dt == 0.0 {
            return;
        }
        let hbar = self.grid.hbar;
        let ks: Vec<Vec<f64>> = self.grid.axes.iter().map(|a| a.wavenumbers()).collect();
        for b in &mut self.branches {
            for (ax, f) in b.factors.iter_mut().enumerate() {
                *f = evolve_factor(f, &ks[ax], self.grid.axes[ax].mass, hbar, dt, false).0;
            }
        }
        self.time = t;
    }

    /// Applies an impulsive kick at the current time.
    pub fn apply_kick(&mut self, kick: &KickSpec) -> Result<()> {
        if self.dims() != 2 {
            return Err(Error::WrongDimension { expected: 2, got: self.dims() });
        }
        let (ax, ay) = (self.grid.axes[0], self.grid.axes[1]);
        let mask = kick.mask(&ax)?;
        let (s_in, s_out) = kick.sign_rule.signs();
        let hbar = self.grid.hbar;
        let mut out = Vec::with_capacity(2 * self.branches.len());
        for b in &self.branches {
            for (inside, sign) in [(true, s_in), (false, s_out)] {
                let mut fx: Vec<C64> = b.factors[0]
                    .iter()
                    .zip(&mask)
                    .map(|(v, m)| if *m == inside { *v } else { C64::new(0.0, 0.0) })
                    .collect();
                let n = normalize_factor(&mut fx, ax.dx());
                let w = b.weight * n;
                if n * n < PRUNE_NORM_SQR {
                    self.discarded += w.norm_sqr();
                    continue;
                }
                let p = sign * kick.k;
                let fy: Vec<C64> = b.factors[1]
                    .iter()
                    .enumerate()
                    .map(|(iy, v)| v * C64::from_polar(1.0, p * ay.x(iy) / hbar))
                    .collect();
                out.push(ProductBranch { weight: w, factors: vec![fx, fy] });
            }
        }
        self.branches = out;
        Ok(())
    }

    /// Dense amplitudes on the full grid.
    pub fn to_dense(&self) -> WaveField {
        let mut f = WaveField::zeros(self.grid.clone());
        f.time = self.time;
        match self.dims() {
            1 => {
                for b in &self.branches {
                    for (a, v) in f.amps.iter_mut().zip(&b.factors[0]) {
                        *a += b.weight * v;
                    }
                }
            }
            _ => {
                let ny = self.grid.axes[1].points;
                for b in &self.branches {
                    for (ix, vx) in b.factors[0].iter().enumerate() {
                        let wx = b.weight * vx;
                        for (iy, vy) in b.factors[1].iter().enumerate() {
                            f.amps[ix * ny + iy] += wx * vy;
                        }
                    }
                }
            }
        }
        f
    }

    /// Density along `axis` integrated over the other axis, with the
    /// particle-axis integration restricted to `mask` when given.
    pub fn marginal_masked(&self, axis: usize, mask: Option<&[bool]>) -> Vec<f64> {
        let n = self.grid.axes[axis].points;
        let other = 1 - axis.min(1);
        let nb = self.branches.len();
        // coefficient of conj(f_i) f_j along `axis`
        let mut coef = vec![vec![C64::new(0.0, 0.0); nb]; nb];
        for i in 0..nb {
            for j in 0..nb {
                let w = self.branches[i].weight.conj() * self.branches[j].weight;
                coef[i][j] = if self.dims() == 1 {
                    w
                } else {
                    let (a, b) = (&self.branches[i].factors[other], &self.branches[j].factors[other]);
                    let dx = self.grid.axes[other].dx();
                    let ip = match (other, mask) {
                        (0, Some(m)) => {
                            a.iter().zip(b).zip(m).filter(|(_, m)| **m).map(|((u, v), _)| u.conj() * v).sum::<C64>() * dx
                        }
                        _ => axis_inner(a, b, dx),
                    };
                    w * ip
                };
            }
        }
        (0..n)
            .map(|p| {
                if axis == 0 {
                    if let Some(m) = mask {
                        if !m[p] {
                            return 0.0;
                        }
                    }
                }
                let mut s = C64::new(0.0, 0.0);
                for i in 0..nb {
                    let fi = self.branches[i].factors[axis][p].conj();
                    for j in 0..nb {
                        s += coef[i][j] * fi * self.branches[j].factors[axis][p];
                    }
                }
                s.re.max(0.0)
            })
            .collect()
    }

    pub fn marginal(&self, axis: usize) -> Vec<f64> {
        self.marginal_masked(axis, None)
    }

    /// Total-variation distance between pointer marginals conditioned on the
    /// particle lying inside and outside `region`.
    pub fn branch_distinguishability(&self, region: (f64, f64)) -> Result<f64> {
        if self.dims() != 2 {
            return Err(Error::WrongDimension { expected: 2, got: self.dims() });
        }
        let probe = KickSpec { k: 0.0, region, sign_rule: super::kick::SignRule::PlusOnRegion, t_apply: 0.0 };
        let mask = probe.mask(&self.grid.axes[0])?;
        let outside: Vec<bool> = mask.iter().map(|m| !m).collect();
        let p = self.marginal_masked(1, Some(&mask));
        let q = self.marginal_masked(1, Some(&outside));
        super::kick::tv_distance(&p, &q, self.grid.axes[1].dx())
    }

    /// `<y>` of the pointer marginal.
    pub fn mean_position(&self, axis: usize) -> f64 {
        let m = self.marginal(axis);
        let a = self.grid.axes[axis];
        let tot: f64 = m.iter().sum();
        m.iter().enumerate().map(|(i, d)| a.x(i) * d).sum::<f64>() / tot
    }

    /// Largest density found at the grid edges of any axis, relative to the
    /// peak of that axis' marginal.
    pub fn edge_density(&self) -> f64 {
        (0..self.dims())
            .map(|ax| {
                let m = self.marginal(ax);
                let peak = m.iter().cloned().fold(0.0, f64::max);
                let n = m.len();
                let edge = m[..n / 32].iter().chain(&m[n - n / 32..]).cloned().fold(0.0, f64::max);
                if peak > 0.0 {
                    edge / peak
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    }
}
