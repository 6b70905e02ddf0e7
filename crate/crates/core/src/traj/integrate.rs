//! Equilibrium sampling and RK4 integration of the guidance equation.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::source::FieldHistory;
use super::{Ensemble, GuidingField, LocalWave, Point, TrajFlags, Trajectory};
use crate::error::{Error, Result};
use crate::rng;
use crate::stats::{ks_statistic, GridCdf};

/// Inverse-CDF cumulative table for the marginal along `axis`.
pub fn marginal_cdf(field: &dyn GuidingField, axis: usize) -> GridCdf {
    let a = field.axis(axis);
    GridCdf::from_density(a.x(0), a.dx(), &field.marginal(axis))
}

/// Draws `n` positions from `|psi|^2`: the particle coordinate from its
/// marginal, then the pointer coordinate from the conditional density at
/// that particle position. Sample `i` uses substream `i` of `seed`.
pub fn sample_initial(field: &dyn GuidingField, n: usize, seed: u64, source: &str) -> Result<Ensemble> {
    if n == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let dims = field.dims();
    let cdf_x = marginal_cdf(field, 0);
    let t0 = field.time();
    let points: Vec<Point> = rng::map_indexed(seed, n, |_, r| {
        let x = cdf_x.quantile(r.random::<f64>());
        if dims == 1 {
            return [x, 0.0];
        }
        let ay = field.axis(1);
        let cond = GridCdf::from_density(ay.x(0), ay.dx(), &field.conditional(x));
        [x, cond.quantile(r.random::<f64>())]
    });
    let mut initial_ks = Vec::with_capacity(dims);
    for axis in 0..dims {
        let cdf = marginal_cdf(field, axis);
        let xs: Vec<f64> = points.iter().map(|p| p[axis]).collect();
        initial_ks.push(ks_statistic(&xs, |x| cdf.eval(x)));
    }
    let trajectories = points
        .into_iter()
        .enumerate()
        .map(|(id, p)| Trajectory { id, times: vec![t0], positions: vec![p], flags: TrajFlags::default() })
        .collect();
    Ok(Ensemble { dims, seed, trajectories, initial_ks, source: source.into() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Step used inside `fine_window`.
    pub dt_fine: f64,
    /// Step used elsewhere.
    pub dt_coarse: f64,
    pub fine_window: Option<(f64, f64)>,
    /// Times at which positions are stored; they become step boundaries.
    pub record_times: Vec<f64>,
    /// Refinement levels; each divides the step by `refine_factor`.
    pub max_refine: u32,
    pub refine_factor: usize,
    /// Stage density, relative to the peak at the start of the step, that
    /// triggers refinement.
    pub refine_density: f64,
    /// Density at the finest level below which a sample is trapped.
    pub trap_density: f64,
    /// Largest stage-velocity disagreement times step, in grid cells.
    pub max_jump: f64,
}

impl IntegratorConfig {
    pub fn uniform(dt: f64, t_final: f64, records: usize) -> Self {
        let records = records.max(1);
        Self {
            dt_fine: dt,
            dt_coarse: dt,
            fine_window: None,
            record_times: (1..=records).map(|i| t_final * i as f64 / records as f64).collect(),
            max_refine: 3,
            refine_factor: 8,
            refine_density: 1e-4,
            trap_density: super::NODE_DENSITY,
            max_jump: 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Step {
    t0: f64,
    h: f64,
    record: bool,
}

fn schedule(t0: f64, t_final: f64, kicks: &[f64], cfg: &IntegratorConfig) -> Vec<Step> {
    let mut marks: Vec<f64> = vec![t0, t_final];
    let inside = |t: f64| t > t0 && t < t_final;
    marks.extend(kicks.iter().copied().filter(|&t| inside(t)));
    marks.extend(cfg.record_times.iter().copied().filter(|&t| inside(t)));
    if let Some((a, b)) = cfg.fine_window {
        marks.extend([a, b].into_iter().filter(|&t| inside(t)));
    }
    marks.sort_by(f64::total_cmp);
    marks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let is_record = |t: f64| (t - t_final).abs() < 1e-12 || cfg.record_times.iter().any(|r| (r - t).abs() < 1e-12);
    let mut steps = Vec::new();
    for w in marks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let fine = cfg.fine_window.is_some_and(|(lo, hi)| mid >= lo && mid <= hi);
        let h = if fine { cfg.dt_fine } else { cfg.dt_coarse };
        let n = ((b - a) / h - 1e-9).ceil().max(1.0) as usize;
        let hs = (b - a) / n as f64;
        for i in 0..n {
            steps.push(Step { t0: a + i as f64 * hs, h: hs, record: i + 1 == n && is_record(b) });
        }
    }
    steps
}

/// Snapshots at the start, middle and end of one outer step.
struct StepFields {
    t0: f64,
    h: f64,
    f: [Arc<dyn GuidingField>; 3],
}

impl StepFields {
    fn eval(&self, t: f64, p: Point) -> LocalWave {
        let s = (t - self.t0) / self.h;
        let near = |v: f64| (s - v).abs() < 1e-12;
        if near(0.0) {
            return self.f[0].local(p);
        }
        if near(0.5) {
            return self.f[1].local(p);
        }
        if near(1.0) {
            return self.f[2].local(p);
        }
        // quadratic Lagrange interpolation in time through the three snapshots
        let l0 = 2.0 * (s - 0.5) * (s - 1.0);
        let l1 = -4.0 * s * (s - 1.0);
        let l2 = 2.0 * s * (s - 0.5);
        LocalWave::scaled_sum(&[(l0, self.f[0].local(p)), (l1, self.f[1].local(p)), (l2, self.f[2].local(p))])
    }
}

struct Ctx<'a> {
    fields: &'a StepFields,
    cfg: &'a IntegratorConfig,
    rho_ref: f64,
    hbar: f64,
    masses: Vec<f64>,
    dx: Vec<f64>,
}

enum Advance {
    Ok(Point),
    Trapped(Point),
}

impl Ctx<'_> {
    fn advance(&self, p: Point, t: f64, h: f64, level: u32, flags: &mut TrajFlags) -> Advance {
        let dims = self.masses.len();
        let mut ks = [[0.0; 2]; 4];
        let mut min_rho = f64::INFINITY;
        let mut need = false;
        let offsets = [0.0, 0.5, 0.5, 1.0];
        for i in 0..4 {
            let mut q = p;
            if i > 0 {
                for d in 0..dims {
                    q[d] = p[d] + offsets[i] * h * ks[i - 1][d];
                }
            }
            let l = self.fields.eval(t + offsets[i] * h, q);
            let rho = l.density();
            min_rho = min_rho.min(rho);
            if !(rho > self.cfg.trap_density * self.rho_ref) {
                need = true;
                break;
            }
            ks[i] = l.velocity(self.hbar, &self.masses);
            if !ks[i][..dims].iter().all(|v| v.is_finite()) {
                need = true;
                break;
            }
        }
        if !need {
            // low density only forces the first split; deeper levels react to velocity jumps
            need = (level == 0 && min_rho < self.cfg.refine_density * self.rho_ref)
                || (1..4).any(|i| (0..dims).any(|d| (ks[i][d] - ks[0][d]).abs() * h > self.cfg.max_jump * self.dx[d]));
        }
        if level == 0 && min_rho < self.cfg.refine_density * self.rho_ref {
            flags.node_events += 1;
        }
        if need && level < self.cfg.max_refine {
            if level == 0 {
                flags.refined_steps += 1;
            }
            let n = self.cfg.refine_factor;
            let hs = h / n as f64;
            let mut q = p;
            for i in 0..n {
                match self.advance(q, t + i as f64 * hs, hs, level + 1, flags) {
                    Advance::Ok(r) => q = r,
                    trapped => return trapped,
                }
            }
            return Advance::Ok(q);
        }
        if need && !(min_rho > self.cfg.trap_density * self.rho_ref) {
            return Advance::Trapped(p);
        }
        let mut out = p;
        for d in 0..dims {
            out[d] = p[d] + h / 6.0 * (ks[0][d] + 2.0 * ks[1][d] + 2.0 * ks[2][d] + ks[3][d]);
        }
        Advance::Ok(out)
    }
}

fn for_each_mut<T: Send, F: Fn(&mut T) + Sync + Send>(v: &mut [T], f: F) {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        v.par_iter_mut().for_each(f);
    }
    #[cfg(not(feature = "parallel"))]
    {
        v.iter_mut().for_each(f);
    }
}

/// Advances every trajectory from its last recorded time to `t_final` with
/// RK4, evaluating the wave on snapshots at the start, midpoint and end of
/// each step. Steps whose stages approach a node or see a sharp velocity
/// change are split into `refine_factor` substeps (recursively, up to
/// `max_refine` levels) using time-interpolated snapshot values; samples
/// that still sit on a node are marked trapped and frozen.
pub fn integrate(ensemble: &Ensemble, history: &FieldHistory, t_final: f64, cfg: &IntegratorConfig) -> Result<Ensemble> {
    let mut out = ensemble.clone();
    let t0 = ensemble.trajectories.first().map(|t| *t.times.last().expect("non-empty")).ok_or(Error::EmptyEnsemble)?;
    if t_final < t0 {
        return Err(Error::Config(format!("t_final {t_final} precedes the ensemble time {t0}")));
    }
    if !(cfg.dt_fine > 0.0 && cfg.dt_coarse > 0.0) {
        return Err(Error::Config("integrator steps must be positive".into()));
    }
    let steps = schedule(t0, t_final, history.kick_times(), cfg);
    let first = history.snapshot_at(t0);
    let hbar = first.hbar();
    let masses = first.masses();
    let dx: Vec<f64> = (0..first.dims()).map(|i| first.axis(i).dx()).collect();
    let mut work: Vec<(Point, Trajectory)> =
        out.trajectories.drain(..).map(|t| (*t.positions.last().expect("non-empty"), t)).collect();
    let mut carry: Option<(usize, f64, Arc<dyn GuidingField>)> = None;
    for step in steps {
        let seg = history.segment_for(step.t0);
        let t1 = step.t0 + step.h;
        let f0 = match carry.take() {
            Some((s, t, f)) if s == seg && (t - step.t0).abs() < 1e-12 => f,
            _ => history.snapshot(step.t0, seg),
        };
        let fm = history.snapshot(step.t0 + 0.5 * step.h, seg);
        let f1 = history.snapshot(t1, seg);
        carry = Some((seg, t1, f1.clone()));
        let fields = StepFields { t0: step.t0, h: step.h, f: [f0, fm, f1.clone()] };
        let rho_ref = fields.f[0].peak_density();
        let ctx = Ctx { fields: &fields, cfg, rho_ref, hbar, masses: masses.clone(), dx: dx.clone() };
        let probe = f1.as_ref();
        for_each_mut(&mut work, |(p, tr)| {
            if tr.flags.excluded() {
                return;
            }
            match ctx.advance(*p, step.t0, step.h, 0, &mut tr.flags) {
                Advance::Ok(q) => *p = q,
                Advance::Trapped(q) => {
                    tr.flags.trapped = true;
                    *p = q;
                }
            }
            if !tr.flags.trapped && !probe.contains(*p) {
                tr.flags.left_grid = true;
            }
            if step.record && !tr.flags.excluded() {
                tr.times.push(t1);
                tr.positions.push(*p);
            }
        });
    }
    out.trajectories = work.into_iter().map(|(_, t)| t).collect();
    Ok(out)
}
