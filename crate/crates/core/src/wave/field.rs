use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::spectral;
use crate::error::{Error, Result};

/// Gaussian wave packet: `|psi|^2` has mean `center` and standard deviation
/// `sigma`; the carrier momentum is `momentum`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    pub center: f64,
    pub momentum: f64,
    pub sigma: f64,
}

impl PacketSpec {
    pub fn new(center: f64, momentum: f64, sigma: f64) -> Self {
        Self { center, momentum, sigma }
    }

    /// Momentum spread `hbar / (2 sigma)`.
    pub fn sigma_p(&self, hbar: f64) -> f64 {
        hbar / (2.0 * self.sigma)
    }

    /// Largest momentum carrying appreciable weight.
    pub fn max_momentum(&self, hbar: f64) -> f64 {
        self.momentum.abs() + 4.0 * self.sigma_p(hbar)
    }

    /// Position-space width after free flight for `t` with mass `mass`.
    pub fn width_at(&self, t: f64, mass: f64, hbar: f64) -> f64 {
        let s = hbar * t / (2.0 * mass * self.sigma * self.sigma);
        self.sigma * (1.0 + s * s).sqrt()
    }

    /// Closed-form free-flight amplitude at `(x, t)`.
    pub fn amplitude(&self, x: f64, t: f64, mass: f64, hbar: f64) -> C64 {
        let (s0, p) = (self.sigma, self.momentum);
        let v = p / mass;
        let a = C64::new(s0 * s0, hbar * t / (2.0 * mass));
        let prefactor = (2.0 * std::f64::consts::PI).powf(-0.25) * (s0 / a).sqrt();
        let d = x - self.center - v * t;
        let phase = p * (x - self.center) / hbar - p * p * t / (2.0 * mass * hbar);
        prefactor * (-d * d / (4.0 * a) + C64::new(0.0, phase)).exp()
    }

    /// Validates the packet against one grid axis.
    pub fn check(&self, grid: &Grid, axis: usize) -> Result<()> {
        let dx = grid.axes[axis].dx();
        if self.sigma <= 2.0 * dx {
            return Err(Error::PacketTooNarrow { sigma: self.sigma, min: 2.0 * dx });
        }
        let limit = grid.band_limit(axis);
        if self.max_momentum(grid.hbar) > limit {
            return Err(Error::MomentumOutOfBand { momentum: self.momentum, limit });
        }
        Ok(())
    }
}

/// Complex amplitudes on a [`Grid`], row-major with the particle axis slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveField {
    pub grid: Grid,
    pub amps: Vec<C64>,
    pub time: f64,
}

impl WaveField {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        Self { grid, amps: vec![C64::new(0.0, 0.0); n], time: 0.0 }
    }

    pub fn shape(&self) -> Vec<usize> {
        self.grid.axes.iter().map(|a| a.points).collect()
    }

    pub fn dims(&self) -> usize {
        self.grid.dims()
    }

    /// `sum |psi|^2 dV`.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.cell()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &WaveField) -> Result<C64> {
        if !self.grid.same_shape(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let s: C64 = self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.cell())
    }

    pub fn density(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Marginal density along `axis`, integrated over the other axis.
    pub fn marginal(&self, axis: usize) -> Vec<f64> {
        let shape = self.shape();
        if shape.len() == 1 {
            return self.density();
        }
        let (nx, ny) = (shape[0], shape[1]);
        let (dx, dy) = (self.grid.axes[0].dx(), self.grid.axes[1].dx());
        let mut out = vec![0.0; shape[axis]];
        for ix in 0..nx {
            for iy in 0..ny {
                let d = self.amps[ix * ny + iy].norm_sqr();
                if axis == 0 {
                    out[ix] += d * dy;
                } else {
                    out[iy] += d * dx;
                }
            }
        }
        out
    }

    /// `<x_axis>` and its standard deviation.
    pub fn position_moments(&self, axis: usize) -> (f64, f64) {
        let m = self.marginal(axis);
        let ax = &self.grid.axes[axis];
        let dx = ax.dx();
        let total: f64 = m.iter().sum::<f64>() * dx;
        let mean = m.iter().enumerate().map(|(i, d)| ax.x(i) * d).sum::<f64>() * dx / total;
        let var = m
            .iter()
            .enumerate()
            .map(|(i, d)| (ax.x(i) - mean).powi(2) * d)
            .sum::<f64>()
            * dx
            / total;
        (mean, var.sqrt())
    }

    fn spectrum(&self) -> Vec<C64> {
        let mut s = self.amps.clone();
        spectral::forward(&mut s, &self.shape());
        s
    }

    /// `<p_axis>` computed in frequency space.
    pub fn mean_momentum(&self, axis: usize) -> f64 {
        let s = self.spectrum();
        let shape = self.shape();
        let ks: Vec<Vec<f64>> = self.grid.axes.iter().map(|a| a.wavenumbers()).collect();
        let (mut num, mut den) = (0.0, 0.0);
        for (i, v) in s.iter().enumerate() {
            let w = v.norm_sqr();
            num += w * spectral::wavenumber_at(i, &shape, &ks, axis);
            den += w;
        }
        self.grid.hbar * num / den
    }

    /// `<H>` for the free Hamiltonian.
    pub fn kinetic_energy(&self) -> f64 {
        let s = self.spectrum();
        let shape = self.shape();
        let ks: Vec<Vec<f64>> = self.grid.axes.iter().map(|a| a.wavenumbers()).collect();
        let hbar = self.grid.hbar;
        let (mut num, mut den) = (0.0, 0.0);
        for (i, v) in s.iter().enumerate() {
            let w = v.norm_sqr();
            let e: f64 = self
                .grid
                .axes
                .iter()
                .enumerate()
                .map(|(ax, a)| {
                    let k = spectral::wavenumber_at(i, &shape, &ks, ax);
                    hbar * hbar * k * k / (2.0 * a.mass)
                })
                .sum();
            num += w * e;
            den += w;
        }
        num / den
    }

    /// Fraction of spectral power above 3/4 of the Nyquist wavenumber on any axis.
    pub fn spectral_leakage(&self) -> f64 {
        let s = self.spectrum();
        let shape = self.shape();
        let ks: Vec<Vec<f64>> = self.grid.axes.iter().map(|a| a.wavenumbers()).collect();
        let (mut hi, mut tot) = (0.0, 0.0);
        for (i, v) in s.iter().enumerate() {
            let w = v.norm_sqr();
            tot += w;
            let outside = self.grid.axes.iter().enumerate().any(|(ax, a)| {
                spectral::wavenumber_at(i, &shape, &ks, ax).abs() > 0.75 * a.k_max()
            });
            if outside {
                hi += w;
            }
        }
        if tot > 0.0 {
            hi / tot
        } else {
            0.0
        }
    }

    /// Spectral derivative along `axis`.
    pub fn gradient(&self, axis: usize) -> Vec<C64> {
        let mut s = self.spectrum();
        let shape = self.shape();
        let ks: Vec<Vec<f64>> = self.grid.axes.iter().map(|a| a.wavenumbers()).collect();
        let n_axis = shape[axis];
        for (i, v) in s.iter_mut().enumerate() {
            // The Nyquist bin has no well-defined sign; drop it from derivatives.
            let j = if shape.len() == 1 { i } else if axis == 0 { i / shape[1] } else { i % shape[1] };
            if j == n_axis / 2 {
                *v = C64::new(0.0, 0.0);
                continue;
            }
            let k = spectral::wavenumber_at(i, &shape, &ks, axis);
            *v *= C64::new(0.0, k);
        }
        spectral::inverse(&mut s, &shape);
        s
    }

    /// One Strang split step of length `dt`: half potential, full kinetic,
    /// half potential. With no potential the step is exact for any `dt`.
    pub fn propagate(&mut self, dt: f64, potential: Option<&[f64]>) {
        let hbar = self.grid.hbar;
        if let Some(v) = potential {
            for (a, &vi) in self.amps.iter_mut().zip(v) {
                *a *= C64::from_polar(1.0, -0.5 * vi * dt / hbar);
            }
        }
        let shape = self.shape();
        spectral::forward(&mut self.amps, &shape);
        let phases: Vec<Vec<C64>> = self
            .grid
            .axes
            .iter()
            .map(|a| {
                a.wavenumbers()
                    .iter()
                    .map(|k| C64::from_polar(1.0, -hbar * k * k * dt / (2.0 * a.mass)))
                    .collect()
            })
            .collect();
        match shape.as_slice() {
            [_] => {
                for (a, p) in self.amps.iter_mut().zip(&phases[0]) {
                    *a *= p;
                }
            }
            [nx, ny] => {
                for ix in 0..*nx {
                    for iy in 0..*ny {
                        self.amps[ix * ny + iy] *= phases[0][ix] * phases[1][iy];
                    }
                }
            }
            _ => unreachable!(),
        }
        spectral::inverse(&mut self.amps, &shape);
        if let Some(v) = potential {
            for (a, &vi) in self.amps.iter_mut().zip(v) {
                *a *= C64::from_polar(1.0, -0.5 * vi * dt / hbar);
            }
        }
        self.time += dt;
    }
}

/// Tolerated spectral leakage before evolution is refused.
pub const LEAKAGE_LIMIT: f64 = 1e-6;

/// Builds a normalized Gaussian packet on a 1D grid, or a product of packets
/// on a 2D grid when `specs` has two entries.
pub fn init_gaussian(grid: &Grid, specs: &[PacketSpec]) -> Result<WaveField> {
    if specs.len() != grid.dims() {
        return Err(Error::WrongDimension { expected: grid.dims(), got: specs.len() });
    }
    for (axis, s) in specs.iter().enumerate() {
        s.check(grid, axis)?;
    }
    let factors: Vec<Vec<C64>> = grid
        .axes
        .iter()
        .zip(specs)
        .map(|(a, s)| (0..a.points).map(|i| s.amplitude(a.x(i), 0.0, a.mass, grid.hbar)).collect())
        .collect();
    let mut f = WaveField::zeros(grid.clone());
    match factors.as_slice() {
        [fx] => f.amps.copy_from_slice(fx),
        [fx, fy] => {
            let ny = fy.len();
            for (ix, vx) in fx.iter().enumerate() {
                for (iy, vy) in fy.iter().enumerate() {
                    f.amps[ix * ny + iy] = vx * vy;
                }
            }
        }
        _ => unreachable!(),
    }
    f.normalize();
    Ok(f)
}

/// Result of [`superpose`].
#[derive(Debug, Clone)]
pub struct Superposition {
    pub field: WaveField,
    /// Factor applied to restore unit norm, `1/||sum||`.
    pub norm_factor: f64,
    /// Probability carried by each weighted branch after normalization.
    pub branch_probabilities: Vec<f64>,
    /// `<psi_i|psi_j>` for every pair `i < j`.
    pub overlaps: Vec<((usize, usize), C64)>,
}

pub fn superpose(parts: &[(C64, &WaveField)]) -> Result<Superposition> {
    let first = parts.first().ok_or(Error::EmptyGrid)?.1;
    if parts.iter().any(|(_, f)| !f.grid.same_shape(&first.grid)) {
        return Err(Error::GridMismatch);
    }
    let mut field = WaveField::zeros(first.grid.clone());
    field.time = first.time;
    for (w, f) in parts {
        for (a, b) in field.amps.iter_mut().zip(&f.amps) {
            *a += w * b;
        }
    }
    let norm = field.norm_sqr().sqrt();
    if norm == 0.0 {
        return Err(Error::Physics("superposition vanishes".into()));
    }
    field.amps.iter_mut().for_each(|a| *a /= norm);
    let branch_probabilities = parts.iter().map(|(w, f)| w.norm_sqr() * f.norm_sqr() / (norm * norm)).collect();
    let mut overlaps = Vec::new();
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            overlaps.push(((i, j), parts[i].1.inner(parts[j].1)?));
        }
    }
    Ok(Superposition { field, norm_factor: 1.0 / norm, branch_probabilities, overlaps })
}

/// Advances `field` by `n_steps` split steps of the grid's `dt`.
pub fn evolve(field: &WaveField, n_steps: usize) -> Result<WaveField> {
    let leakage = field.spectral_leakage();
    if leakage > LEAKAGE_LIMIT {
        return Err(Error::BandwidthViolation { leakage, limit: LEAKAGE_LIMIT });
    }
    let mut f = field.clone();
    let dt = f.grid.dt;
    for _ in 0..n_steps {
        f.propagate(dt, None);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::grid::Axis;

    fn grid() -> Grid {
        Grid::new_1d(1024, 60.0).unwrap()
    }

    #[test]
    fn symmetric_packet_moments() {
        let f = init_gaussian(&grid(), &[PacketSpec::new(0.0, 0.0, 1.0)]).unwrap();
        assert!((f.norm_sqr() - 1.0).abs() < 1e-12);
        let (m, s) = f.position_moments(0);
        assert!(m.abs() < 1e-10);
        assert!((s - 1.0).abs() < 1e-8);
        assert!(f.mean_momentum(0).abs() < 1e-10);
    }

    #[test]
    fn boosted_packet_moments() {
        let f = init_gaussian(&grid(), &[PacketSpec::new(-3.0, 1.5, 1.2)]).unwrap();
        let (m, _) = f.position_moments(0);
        assert!((m + 3.0).abs() < f.grid.axes[0].dx());
        assert!((f.mean_momentum(0) - 1.5).abs() < f.grid.axes[0].dk());
    }

    #[test]
    fn closed_form_matches_sampled_packet() {
        let g = grid();
        let spec = PacketSpec::new(1.0, -0.7, 1.3);
        let f = init_gaussian(&g, &[spec]).unwrap();
        for i in (0..1024).step_by(37) {
            let x = g.axes[0].x(i);
            assert!((f.amps[i] - spec.amplitude(x, 0.0, 1.0, 1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn narrow_or_fast_packets_are_rejected() {
        let g = grid();
        let dx = g.axes[0].dx();
        assert!(matches!(
            init_gaussian(&g, &[PacketSpec::new(0.0, 0.0, 1.5 * dx)]),
            Err(Error::PacketTooNarrow { .. })
        ));
        assert!(matches!(
            init_gaussian(&g, &[PacketSpec::new(0.0, 40.0, 1.0)]),
            Err(Error::MomentumOutOfBand { .. })
        ));
    }

    #[test]
    fn zero_steps_is_identity() {
        let f = init_gaussian(&grid(), &[PacketSpec::new(0.0, 1.0, 1.0)]).unwrap();
        assert_eq!(evolve(&f, 0).unwrap(), f);
    }

    #[test]
    fn evolution_preserves_norm_and_energy() {
        let f = init_gaussian(&grid(), &[PacketSpec::new(-5.0, 2.0, 1.0)]).unwrap();
        let e0 = f.kinetic_energy();
        let mut g = f.clone();
        for _ in 0..50 {
            let before = g.norm_sqr();
            g = evolve(&g, 10).unwrap();
            assert!((g.norm_sqr() - before).abs() < 1e-10 * 10.0);
        }
        assert!((g.norm_sqr() - 1.0).abs() < 1e-8);
        assert!((g.kinetic_energy() - e0).abs() < 1e-8 * e0);
    }

    #[test]
    fn free_flight_matches_closed_form() {
        let g = grid();
        let spec = PacketSpec::new(-4.0, 1.0, 1.0);
        let mut f = init_gaussian(&g, &[spec]).unwrap();
        f.propagate(3.7, None);
        let err: f64 = (0..1024)
            .map(|i| (f.amps[i] - spec.amplitude(g.axes[0].x(i), 3.7, 1.0, 1.0)).norm_sqr())
            .sum::<f64>()
            * g.axes[0].dx();
        assert!(err.sqrt() < 1e-10, "L2 error {}", err.sqrt());
    }

    #[test]
    fn superposition_bookkeeping() {
        let g = grid();
        let a = init_gaussian(&g, &[PacketSpec::new(-10.0, 0.0, 1.0)]).unwrap();
        let b = init_gaussian(&g, &[PacketSpec::new(10.0, 0.0, 1.0)]).unwrap();
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let s = superpose(&[(h, &a), (h, &b)]).unwrap();
        for p in &s.branch_probabilities {
            assert!((p - 0.5).abs() < 1e-10);
        }
        let id = superpose(&[(C64::new(1.0, 0.0), &a), (C64::new(0.0, 0.0), &b)]).unwrap();
        assert!(id.field.amps.iter().zip(&a.amps).all(|(u, v)| (u - v).norm() < 1e-14));
        // Two copies of one packet: the sum has norm sqrt 2 and collapses back to the packet.
        let twin = superpose(&[(h, &a), (h, &a)]).unwrap();
        assert!((twin.norm_factor - h.re).abs() < 1e-10);
        assert!(twin.field.amps.iter().zip(&a.amps).all(|(u, v)| (u - v).norm() < 1e-10));
        assert!((twin.overlaps[0].1.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn superpose_rejects_mismatched_grids() {
        let a = init_gaussian(&grid(), &[PacketSpec::new(0.0, 0.0, 1.0)]).unwrap();
        let g2 = Grid::new_1d(512, 60.0).unwrap();
        let b = init_gaussian(&g2, &[PacketSpec::new(0.0, 0.0, 1.0)]).unwrap();
        let one = C64::new(1.0, 0.0);
        assert!(matches!(superpose(&[(one, &a), (one, &b)]), Err(Error::GridMismatch)));
    }

    #[test]
    fn aliased_field_is_refused() {
        let g = Grid::new_1d(64, 6.4).unwrap();
        let mut f = WaveField::zeros(g.clone());
        for (i, a) in f.amps.iter_mut().enumerate() {
            *a = C64::from_polar(1.0, 0.9 * std::f64::consts::PI * i as f64);
        }
        f.normalize();
        assert!(matches!(evolve(&f, 1), Err(Error::BandwidthViolation { .. })));
    }

    #[test]
    fn product_packet_in_two_dimensions() {
        let g = Grid::new_2d(Axis::new(128, 20.0, 1.0).unwrap(), Axis::new(128, 32.0, 5.0).unwrap()).unwrap();
        let f = init_gaussian(&g, &[PacketSpec::new(1.0, 0.5, 1.0), PacketSpec::new(-2.0, 0.0, 1.5)]).unwrap();
        assert!((f.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((f.position_moments(0).0 - 1.0).abs() < 1e-8);
        assert!((f.position_moments(1).0 + 2.0).abs() < 1e-8);
        assert!((f.mean_momentum(0) - 0.5).abs() < g.axes[0].dk());
    }
}
