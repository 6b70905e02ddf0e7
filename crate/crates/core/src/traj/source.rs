//! Frozen wave snapshots and the piecewise-free history they are cut from.

use std::sync::Arc;

use num_complex::Complex64 as C64;

use super::interp;
use super::{GuidingField, LocalWave, Point};
use crate::error::{Error, Result};
use crate::wave::separable::evolve_factor;
use crate::wave::{apply_kick, Axis, KickSpec, SeparableField, WaveField};

/// Dense field plus spectral gradients.
#[derive(Debug, Clone)]
pub struct GridSnapshot {
    field: WaveField,
    grads: Vec<Vec<C64>>,
    peak: f64,
}

impl GridSnapshot {
    pub fn new(field: &WaveField) -> Self {
        let grads = (0..field.dims()).map(|ax| field.gradient(ax)).collect();
        let peak = field.amps.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
        Self { field: field.clone(), grads, peak }
    }

    pub fn field(&self) -> &WaveField {
        &self.field
    }

    fn interp2(&self, values: &[C64], sx: &interp::Stencil, sy: &interp::Stencil) -> C64 {
        let ny = self.field.grid.axes[1].points;
        let mut s = C64::new(0.0, 0.0);
        for (ix, wx) in sx.0.iter().zip(&sx.1) {
            let row = &values[ix * ny..(ix + 1) * ny];
            s += interp::apply(row, sy) * *wx;
        }
        s
    }
}

impl GuidingField for GridSnapshot {
    fn dims(&self) -> usize {
        self.field.dims()
    }

    fn time(&self) -> f64 {
        self.field.time
    }

    fn hbar(&self) -> f64 {
        self.field.grid.hbar
    }

    fn axis(&self, i: usize) -> Axis {
        self.field.grid.axes[i]
    }

    fn local(&self, p: Point) -> LocalWave {
        let ax = self.axis(0);
        let sx = interp::stencil(&ax, p[0]);
        if self.dims() == 1 {
            return LocalWave {
                psi: interp::apply(&self.field.amps, &sx),
                grad: [interp::apply(&self.grads[0], &sx), C64::new(0.0, 0.0)],
            };
        }
        let sy = interp::stencil(&self.axis(1), p[1]);
        LocalWave {
            psi: self.interp2(&self.field.amps, &sx, &sy),
            grad: [self.interp2(&self.grads[0], &sx, &sy), self.interp2(&self.grads[1], &sx, &sy)],
        }
    }

    fn marginal(&self, i: usize) -> Vec<f64> {
        self.field.marginal(i)
    }

    fn conditional(&self, x: f64) -> Vec<f64> {
        if self.dims() == 1 {
            return Vec::new();
        }
        let ny = self.axis(1).points;
        let (idx, w) = interp::stencil(&self.axis(0), x);
        (0..ny)
            .map(|iy| {
                idx.iter()
                    .zip(&w)
                    .map(|(ix, wx)| self.field.amps[ix * ny + iy] * *wx)
                    .sum::<C64>()
                    .norm_sqr()
            })
            .collect()
    }

    fn peak_density(&self) -> f64 {
        self.peak
    }
}

/// Product-branch field with per-factor derivatives.
#[derive(Debug, Clone)]
pub struct SeparableSnapshot {
    field: SeparableField,
    /// `derivs[branch][axis]`
    derivs: Vec<Vec<Vec<C64>>>,
    peak: f64,
}

impl SeparableSnapshot {
    /// Evolves `field` freely to `t` and differentiates every factor.
    pub fn new(field: &SeparableField, t: f64) -> Self {
        let grid = &field.grid;
        let ks: Vec<Vec<f64>> = grid.axes.iter().map(|a| a.wavenumbers()).collect();
        let dt = t - field.time;
        let mut out = field.clone();
        let mut derivs = Vec::with_capacity(field.branches.len());
        for b in &mut out.branches {
            let mut ds = Vec::with_capacity(b.factors.len());
            for (ax, f) in b.factors.iter_mut().enumerate() {
                let (v, d) = evolve_factor(f, &ks[ax], grid.axes[ax].mass, grid.hbar, dt, true);
                *f = v;
                ds.push(d.expect("derivative requested"));
            }
            derivs.push(ds);
        }
        out.time = t;
        let peak = out
            .branches
            .iter()
            .map(|b| {
                b.weight.norm_sqr()
                    * b.factors.iter().map(|f| f.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max)).product::<f64>()
            })
            .fold(0.0, f64::max);
        Self { field: out, derivs, peak }
    }

    pub fn field(&self) -> &SeparableField {
        &self.field
    }
}

impl GuidingField for SeparableSnapshot {
    fn dims(&self) -> usize {
        self.field.dims()
    }

    fn time(&self) -> f64 {
        self.field.time
    }

    fn hbar(&self) -> f64 {
        self.field.grid.hbar
    }

    fn axis(&self, i: usize) -> Axis {
        self.field.grid.axes[i]
    }

    fn local(&self, p: Point) -> LocalWave {
        let dims = self.dims();
        let stencils: Vec<interp::Stencil> = (0..dims).map(|i| interp::stencil(&self.axis(i), p[i])).collect();
        let mut out = LocalWave { psi: C64::new(0.0, 0.0), grad: [C64::new(0.0, 0.0); 2] };
        for (b, d) in self.field.branches.iter().zip(&self.derivs) {
            let fx = interp::apply(&b.factors[0], &stencils[0]);
            let dfx = interp::apply(&d[0], &stencils[0]);
            if dims == 1 {
                out.psi += b.weight * fx;
                out.grad[0] += b.weight * dfx;
            } else {
                let gy = interp::apply(&b.factors[1], &stencils[1]);
                let dgy = interp::apply(&d[1], &stencils[1]);
                out.psi += b.weight * fx * gy;
                out.grad[0] += b.weight * dfx * gy;
                out.grad[1] += b.weight * fx * dgy;
            }
        }
        out
    }

    fn marginal(&self, i: usize) -> Vec<f64> {
        self.field.marginal(i)
    }

    fn conditional(&self, x: f64) -> Vec<f64> {
        if self.dims() == 1 {
            return Vec::new();
        }
        let sx = interp::stencil(&self.axis(0), x);
        let coefs: Vec<C64> = self.field.branches.iter().map(|b| b.weight * interp::apply(&b.factors[0], &sx)).collect();
        (0..self.axis(1).points)
            .map(|iy| {
                self.field
                    .branches
                    .iter()
                    .zip(&coefs)
                    .map(|(b, c)| c * b.factors[1][iy])
                    .sum::<C64>()
                    .norm_sqr()
            })
            .collect()
    }

    fn peak_density(&self) -> f64 {
        self.peak
    }
}

#[derive(Debug, Clone)]
enum Segment {
    Dense(WaveField),
    Separable(SeparableField),
}

/// Free evolution interrupted by impulsive kicks.
///
/// Segment `i` holds the wave just after the first `i` kicks; the wave at
/// any time in that segment is its exact free evolution.
#[derive(Debug, Clone)]
pub struct FieldHistory {
    kick_times: Vec<f64>,
    segments: Vec<Segment>,
    label: String,
}

/// Kick times closer than this to a step start count as already applied.
const TIME_EPS: f64 = 1e-12;

fn sorted(kicks: &[KickSpec]) -> Vec<KickSpec> {
    let mut k = kicks.to_vec();
    k.sort_by(|a, b| a.t_apply.total_cmp(&b.t_apply));
    k
}

impl FieldHistory {
    pub fn dense(initial: WaveField, kicks: &[KickSpec]) -> Result<Self> {
        let kicks = sorted(kicks);
        let mut segments = vec![Segment::Dense(initial.clone())];
        let mut cur = initial;
        for k in &kicks {
            if k.t_apply < cur.time {
                return Err(Error::Config(format!("kick at t={} precedes the initial wave", k.t_apply)));
            }
            cur.propagate(k.t_apply - cur.time, None);
            cur = apply_kick(&cur, k)?;
            segments.push(Segment::Dense(cur.clone()));
        }
        Ok(Self { kick_times: kicks.iter().map(|k| k.t_apply).collect(), segments, label: "dense grid".into() })
    }

    pub fn separable(initial: SeparableField, kicks: &[KickSpec]) -> Result<Self> {
        let kicks = sorted(kicks);
        let mut segments = vec![Segment::Separable(initial.clone())];
        let mut cur = initial;
        for k in &kicks {
            if k.t_apply < cur.time {
                return Err(Error::Config(format!("kick at t={} precedes the initial wave", k.t_apply)));
            }
            cur.propagate_to(k.t_apply);
            cur.apply_kick(k)?;
            segments.push(Segment::Separable(cur.clone()));
        }
        Ok(Self { kick_times: kicks.iter().map(|k| k.t_apply).collect(), segments, label: "product branches".into() })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kick_times(&self) -> &[f64] {
        &self.kick_times
    }

    pub fn start_time(&self) -> f64 {
        match &self.segments[0] {
            Segment::Dense(f) => f.time,
            Segment::Separable(f) => f.time,
        }
    }

    /// Segment in force for a step starting at `t`.
    pub fn segment_for(&self, t: f64) -> usize {
        self.kick_times.iter().filter(|&&k| k <= t + TIME_EPS).count()
    }

    pub fn snapshot(&self, t: f64, segment: usize) -> Arc<dyn GuidingField> {
        match &self.segments[segment] {
            Segment::Dense(f) => {
                let mut g = f.clone();
                g.propagate(t - f.time, None);
                g.time = t;
                Arc::new(GridSnapshot::new(&g))
            }
            Segment::Separable(f) => Arc::new(SeparableSnapshot::new(f, t)),
        }
    }

    pub fn snapshot_at(&self, t: f64) -> Arc<dyn GuidingField> {
        self.snapshot(t, self.segment_for(t))
    }

    /// Probability dropped when kicks split branches.
    pub fn discarded(&self) -> f64 {
        match self.segments.last() {
            Some(Segment::Separable(f)) => f.discarded,
            _ => 0.0,
        }
    }

    /// Product-branch field at `t`, if the history is stored that way.
    pub fn separable_at(&self, t: f64) -> Option<SeparableField> {
        match &self.segments[self.segment_for(t)] {
            Segment::Separable(f) => {
                let mut g = f.clone();
                g.propagate_to(t);
                Some(g)
            }
            Segment::Dense(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::{Grid, PacketSpec, SignRule};

    #[test]
    fn separable_and_dense_snapshots_agree() {
        let g = Grid::new_2d(Axis::new(256, 48.0, 1.0).unwrap(), Axis::new(128, 32.0, 2.0).unwrap()).unwrap();
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let py = PacketSpec::new(0.0, 0.0, 1.0);
        let s = SeparableField::from_packets(
            &g,
            &[(h, vec![PacketSpec::new(-8.0, 2.0, 1.0), py]), (h, vec![PacketSpec::new(8.0, -2.0, 1.0), py])],
        )
        .unwrap();
        let kick = KickSpec { k: 1.5, region: (f64::NEG_INFINITY, 0.0), sign_rule: SignRule::PlusMinusSplit, t_apply: 0.5 };
        let hs = FieldHistory::separable(s.clone(), &[kick]).unwrap();
        let hd = FieldHistory::dense(s.to_dense(), &[kick]).unwrap();
        for t in [0.2, 0.5, 3.0] {
            let (a, b) = (hs.snapshot_at(t), hd.snapshot_at(t));
            for p in [[-1.0, 0.3], [0.2, -0.7], [2.5, 1.1]] {
                let (la, lb) = (a.local(p), b.local(p));
                assert!((la.psi - lb.psi).norm() < 1e-8, "t={t} p={p:?}");
                assert!((la.grad[0] - lb.grad[0]).norm() < 1e-7);
                assert!((la.grad[1] - lb.grad[1]).norm() < 1e-7);
            }
            let (ca, cb) = (a.conditional(0.37), b.conditional(0.37));
            assert!(ca.iter().zip(&cb).all(|(u, v)| (u - v).abs() < 1e-9));
        }
        assert_eq!(hs.segment_for(0.5), 1);
        assert_eq!(hs.segment_for(0.4999), 0);
    }
}
