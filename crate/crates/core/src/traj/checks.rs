//! Ordering, uniqueness, bounce labels and equivariance of ensembles.

use serde::{Deserialize, Serialize};

use super::integrate::marginal_cdf;
use super::source::FieldHistory;
use super::{Ensemble, Point, Trajectory};
use crate::error::{Error, Result};
use crate::stats::{inversions, ks_statistic, ks_threshold};

/// Distances at or below this count as a configuration-space collision.
pub const COLLISION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub dims: usize,
    pub samples: usize,
    pub record_times: usize,
    /// 1D: order inversions relative to the starting order, summed over
    /// record times. 2D: record times at which two distinct samples met.
    pub config_crossings: u64,
    /// Smallest distance between distinct samples over all record times.
    pub min_separation: f64,
    /// Pairs whose particle-axis order differs between start and end.
    pub shadow_crossings: u64,
    /// Samples sharing a starting point with an earlier sample; they are
    /// left out of the comparisons above.
    pub degenerate: usize,
}

impl CrossingReport {
    pub fn no_crossing(&self) -> bool {
        self.config_crossings == 0
    }
}

fn closest_pair(points: &mut [Point]) -> f64 {
    points.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let dx = points[j][0] - points[i][0];
            if dx >= best {
                break;
            }
            let d = dx.hypot(points[j][1] - points[i][1]);
            best = best.min(d);
        }
    }
    best
}

pub fn check_no_crossing(ensemble: &Ensemble) -> CrossingReport {
    let mut live: Vec<&Trajectory> = ensemble.live().collect();
    live.sort_by(|a, b| a.start()[0].total_cmp(&b.start()[0]).then(a.start()[1].total_cmp(&b.start()[1])));
    let before = live.len();
    live.dedup_by(|a, b| a.start() == b.start());
    let degenerate = before - live.len();
    let n_rec = live.iter().map(|t| t.positions.len()).min().unwrap_or(0);
    let mut config_crossings = 0u64;
    let mut min_separation = f64::INFINITY;
    for k in 0..n_rec {
        if ensemble.dims == 1 {
            let xs: Vec<f64> = live.iter().map(|t| t.positions[k][0]).collect();
            config_crossings += inversions(&xs);
            let mut sorted = xs;
            sorted.sort_by(f64::total_cmp);
            let gap = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
            min_separation = min_separation.min(gap);
        } else {
            let mut pts: Vec<Point> = live.iter().map(|t| t.positions[k]).collect();
            let d = closest_pair(&mut pts);
            if d <= COLLISION_TOL {
                config_crossings += 1;
            }
            min_separation = min_separation.min(d);
        }
    }
    let ends: Vec<f64> = live.iter().map(|t| t.positions[n_rec.max(1) - 1][0]).collect();
    // `live` is ordered by starting particle coordinate, so inversions of the
    // final coordinates are pairs whose shadows swapped sides
    let mut by_x: Vec<(f64, f64)> = live.iter().zip(&ends).map(|(t, e)| (t.start()[0], *e)).collect();
    by_x.sort_by(|a, b| a.0.total_cmp(&b.0));
    let shadow_crossings = inversions(&by_x.iter().map(|p| p.1).collect::<Vec<_>>());
    CrossingReport {
        dims: ensemble.dims,
        samples: live.len(),
        record_times: n_rec,
        config_crossings,
        min_separation,
        shadow_crossings,
        degenerate,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BounceClass {
    Bounced,
    Crossed,
}

/// Where and when the two packets overlap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingWindow {
    pub x_c: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    /// Final positions closer than this to `x_c` are not conclusive.
    pub half_width: f64,
}

/// Labels a trajectory by comparing the side it started on with the side
/// it ends on, once it has left the crossing window and is moving away
/// from the crossing point.
pub fn classify_bounce(tr: &Trajectory, w: &CrossingWindow) -> Result<BounceClass> {
    let n = tr.positions.len();
    let t_end = tr.times.last().copied().unwrap_or(f64::NEG_INFINITY);
    if n < 2 || t_end < w.t_hi {
        return Err(Error::Inconclusive(tr.id));
    }
    let end = tr.positions[n - 1][0] - w.x_c;
    let v = (tr.positions[n - 1][0] - tr.positions[n - 2][0]) / (tr.times[n - 1] - tr.times[n - 2]);
    if end.abs() < w.half_width || end.signum() != v.signum() {
        return Err(Error::Inconclusive(tr.id));
    }
    let start = tr.start()[0] - w.x_c;
    Ok(if start.signum() == end.signum() { BounceClass::Bounced } else { BounceClass::Crossed })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsCheck {
    pub t: f64,
    pub axis: usize,
    pub statistic: f64,
    pub threshold: f64,
    pub samples: usize,
    pub pass: bool,
}

/// KS distance between recorded positions and `|psi(t)|^2` marginals at
/// each requested record time.
pub fn equivariance(ensemble: &Ensemble, history: &FieldHistory, times: &[f64], scale: f64) -> Result<Vec<KsCheck>> {
    let rec = ensemble.record_times().to_vec();
    let mut out = Vec::new();
    for &t in times {
        let k = rec
            .iter()
            .position(|r| (r - t).abs() < 1e-9)
            .ok_or_else(|| Error::Config(format!("t={t} is not a record time")))?;
        let snap = history.snapshot_at(t);
        for axis in 0..ensemble.dims {
            let xs: Vec<f64> = ensemble.live().filter(|tr| tr.positions.len() > k).map(|tr| tr.positions[k][axis]).collect();
            if xs.is_empty() {
                return Err(Error::EmptyEnsemble);
            }
            let cdf = marginal_cdf(snap.as_ref(), axis);
            let d = ks_statistic(&xs, |x| cdf.eval(x));
            let threshold = scale * ks_threshold(xs.len());
            out.push(KsCheck { t, axis, statistic: d, threshold, samples: xs.len(), pass: d < threshold });
        }
    }
    Ok(out)
}
