//! Bohmian trajectories: guidance velocities, equilibrium sampling and
//! integration alongside the evolving wave.

pub mod checks;
pub mod integrate;
pub mod interp;
pub mod source;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wave::Axis;

pub use checks::{check_no_crossing, classify_bounce, equivariance, BounceClass, CrossingReport, CrossingWindow, KsCheck};
pub use integrate::{integrate, sample_initial, IntegratorConfig};
pub use source::{FieldHistory, GridSnapshot, SeparableSnapshot};

/// Configuration point; the second coordinate is unused in 1D.
pub type Point = [f64; 2];

/// `psi` and its gradient at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalWave {
    pub psi: C64,
    pub grad: [C64; 2],
}

impl LocalWave {
    pub fn density(&self) -> f64 {
        self.psi.norm_sqr()
    }

    pub fn scaled_sum(parts: &[(f64, LocalWave)]) -> LocalWave {
        let mut out = LocalWave { psi: C64::new(0.0, 0.0), grad: [C64::new(0.0, 0.0); 2] };
        for (w, l) in parts {
            out.psi += l.psi * *w;
            out.grad[0] += l.grad[0] * *w;
            out.grad[1] += l.grad[1] * *w;
        }
        out
    }

    /// Guidance velocity `(hbar/m) Im(grad psi / psi)` per axis.
    pub fn velocity(&self, hbar: f64, masses: &[f64]) -> Point {
        let mut v = [0.0; 2];
        for (i, m) in masses.iter().enumerate() {
            v[i] = hbar / m * (self.grad[i] / self.psi).im;
        }
        v
    }
}

/// A wave function frozen at one instant, evaluable off-grid.
pub trait GuidingField: Send + Sync {
    fn dims(&self) -> usize;
    fn time(&self) -> f64;
    fn hbar(&self) -> f64;
    fn axis(&self, i: usize) -> Axis;
    fn local(&self, p: Point) -> LocalWave;
    /// Density integrated over all other axes, sampled on `axis(i)`.
    fn marginal(&self, i: usize) -> Vec<f64>;
    /// Unnormalized density along the pointer axis at particle position `x`.
    fn conditional(&self, x: f64) -> Vec<f64>;
    /// Largest `|psi|^2` on the grid, or a close estimate of it.
    fn peak_density(&self) -> f64;

    fn masses(&self) -> Vec<f64> {
        (0..self.dims()).map(|i| self.axis(i).mass).collect()
    }

    fn contains(&self, p: Point) -> bool {
        (0..self.dims()).all(|i| self.axis(i).contains(p[i]))
    }
}

/// Relative density below which the velocity is refused.
pub const NODE_DENSITY: f64 = 1e-12;

pub fn velocity(field: &dyn GuidingField, p: Point) -> Result<Point> {
    let l = field.local(p);
    if l.density() < NODE_DENSITY * field.peak_density() {
        return Err(Error::NodeProximity { density: l.density() });
    }
    Ok(l.velocity(field.hbar(), &field.masses()))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajFlags {
    /// Steps that needed refinement near a node or a sharp velocity change.
    pub refined_steps: u32,
    /// Stages that landed where the density is below the refinement level.
    pub node_events: u32,
    pub trapped: bool,
    pub left_grid: bool,
}

impl TrajFlags {
    pub fn excluded(&self) -> bool {
        self.trapped || self.left_grid
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub id: usize,
    pub times: Vec<f64>,
    pub positions: Vec<Point>,
    pub flags: TrajFlags,
}

impl Trajectory {
    pub fn start(&self) -> Point {
        self.positions[0]
    }

    pub fn end(&self) -> Point {
        *self.positions.last().expect("trajectory has a start point")
    }

    /// Position at record index `k`, or the last one recorded before it stopped.
    pub fn at(&self, k: usize) -> Point {
        self.positions[k.min(self.positions.len() - 1)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub dims: usize,
    pub seed: u64,
    pub trajectories: Vec<Trajectory>,
    /// KS statistic of the initial positions against each axis marginal.
    pub initial_ks: Vec<f64>,
    /// Label of the wave the ensemble was drawn from.
    pub source: String,
}

impl Ensemble {
    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn excluded(&self) -> usize {
        self.trajectories.iter().filter(|t| t.flags.excluded()).count()
    }

    pub fn live(&self) -> impl Iterator<Item = &Trajectory> {
        self.trajectories.iter().filter(|t| !t.flags.excluded())
    }

    /// Record times shared by all trajectories.
    pub fn record_times(&self) -> &[f64] {
        self.trajectories.iter().map(|t| t.times.as_slice()).max_by_key(|t| t.len()).unwrap_or(&[])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::{init_gaussian, Grid, PacketSpec};

    fn snap(spec: PacketSpec) -> GridSnapshot {
        let g = Grid::new_1d(1024, 60.0).unwrap();
        GridSnapshot::new(&init_gaussian(&g, &[spec]).unwrap())
    }

    #[test]
    fn boosted_packet_moves_at_p_over_m() {
        let s = snap(PacketSpec::new(0.0, 1.5, 1.0));
        assert!((velocity(&s, [0.0, 0.0]).unwrap()[0] - 1.5).abs() < 1e-6);
    }

    #[test]
    fn real_packet_is_at_rest() {
        let s = snap(PacketSpec::new(0.0, 0.0, 1.0));
        for x in [-3.0, -0.3, 0.0, 1.7] {
            assert!(velocity(&s, [x, 0.0]).unwrap()[0].abs() < 1e-10);
        }
    }

    #[test]
    fn node_is_refused() {
        let s = snap(PacketSpec::new(0.0, 0.0, 1.0));
        assert!(matches!(velocity(&s, [25.0, 0.0]), Err(Error::NodeProximity { .. })));
    }
}
