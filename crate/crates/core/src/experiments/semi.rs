//! Semi-interferometer: two packets meet at a crossing point, optionally
//! watched by a pointer that is kicked according to the particle's side.
//!
//! Packet 0 is mode 1 and packet 1 is mode 2. Detector 1 sits where mode 1
//! ends up, i.e. on the far side of the crossing point from mode 1's start.
//! A trajectory's path is the mode it starts in.

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::config::{Kind, KickConfig, PointerSpec, ScenarioConfig, SweepParam};
use super::Verdict;
use crate::error::{Error, Result};
use crate::stats::{pearson, wilson, Proportion};
use crate::traj::{
    check_no_crossing, classify_bounce, equivariance, integrate, sample_initial, BounceClass, CrossingReport,
    CrossingWindow, Ensemble, FieldHistory, IntegratorConfig, KsCheck,
};
use crate::wave::kick::tv_distance;
use crate::wave::{pointer_separation_time, Axis, Grid, KickSpec, PacketSpec, SeparableField, SeparationTime};

pub const PARTICLE_MASS: f64 = 1.0;
pub const HBAR: f64 = 1.0;
/// Uniformly spaced record times, on top of the crossing and readout times.
pub const RECORDS: usize = 200;
/// Coarse steps are this many fine steps, or longer when the run would
/// otherwise need more than `MAX_COARSE_STEPS` of them.
pub const COARSE_FACTOR: f64 = 5.0;
pub const MAX_COARSE_STEPS: f64 = 2000.0;
pub const MIN_PARTICLE_POINTS: usize = 2048;
pub const MIN_POINTER_POINTS: usize = 512;
/// Largest tolerated share of trapped or lost samples.
pub const MAX_EXCLUDED: f64 = 0.005;
/// Regime edges on `tau / T_cross`.
pub const FAST_RATIO: f64 = 0.1;
pub const SLOW_RATIO: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    NoPointer,
    /// Pointer present but never kicked.
    Uncoupled,
    Fast,
    Intermediate,
    Slow,
}

impl Regime {
    pub fn from_ratio(r: f64) -> Self {
        if r <= FAST_RATIO + 1e-9 {
            Regime::Fast
        } else if r >= SLOW_RATIO - 1e-9 {
            Regime::Slow
        } else {
            Regime::Intermediate
        }
    }
}

/// Everything derived from a semi-interferometer config before running it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemiSetup {
    pub packets: [PacketSpec; 2],
    pub pointer: Option<PointerSpec>,
    pub kick: Option<KickSpec>,
    pub t_cross: f64,
    pub x_c: f64,
    pub window: CrossingWindow,
    /// Pointer separation time; `None` without a pointer or with zero kick.
    pub tau: Option<f64>,
    pub t_read: Option<f64>,
    pub t_final: f64,
    pub grid: Grid,
    pub n: usize,
    pub seed: u64,
    pub dt: f64,
}

fn width(sigma: f64, mass: f64, t: f64) -> f64 {
    let s = HBAR * t / (2.0 * mass * sigma * sigma);
    sigma * (1.0 + s * s).sqrt()
}

fn sized_axis(points: Option<usize>, extent: Option<f64>, half: f64, dx_max: f64, min_points: usize, mass: f64) -> Result<Axis> {
    let extent = extent.unwrap_or(2.0 * half);
    let points =
        points.unwrap_or_else(|| ((extent / dx_max).ceil() as usize).next_power_of_two().max(min_points));
    Axis::new(points, extent, mass)
}

impl SemiSetup {
    pub fn from_config(config: &ScenarioConfig) -> Result<Self> {
        if !matches!(config.kind, Kind::Semi | Kind::PointerSweep) {
            return Err(Error::Config(format!("expected a semi-interferometer scenario, got {}", config.kind.name())));
        }
        config.validate()?;
        let c = config.resolved();
        let ps = c.packets.clone().unwrap_or_else(super::config::default_packets);
        let packets = [ps[0], ps[1]];
        if let (Some(n), Some(ext)) = (c.grid.points, c.grid.extent) {
            let dx = ext / n.max(1) as f64;
            if let Some(p) = packets.iter().find(|p| p.sigma <= 2.0 * dx) {
                return Err(Error::PacketTooNarrow { sigma: p.sigma, min: 2.0 * dx });
            }
        }
        let v = packets.map(|p| p.momentum / PARTICLE_MASS);
        let gap = packets[1].center - packets[0].center;
        let closing = v[0] - v[1];
        let t_cross = if closing != 0.0 { gap / closing } else { f64::INFINITY };
        if !(t_cross > 0.0 && t_cross.is_finite()) {
            return Err(Error::NoCrossing { t_final: c.t_final.unwrap_or(f64::NAN), t_cross });
        }
        let x_c = packets[0].center + v[0] * t_cross;
        let sigma_cross = packets.iter().map(|p| width(p.sigma, PARTICLE_MASS, t_cross)).fold(0.0, f64::max);
        let speed = 0.5 * closing.abs();
        let window = CrossingWindow {
            x_c,
            t_lo: (t_cross - 4.0 * sigma_cross / speed).max(0.0),
            t_hi: t_cross + 4.0 * sigma_cross / speed,
            half_width: 2.0 * sigma_cross,
        };

        let pointer = c.pointer;
        let kick = match (pointer, c.kick) {
            (Some(_), Some(k)) => Some(kick_spec(&k, packets[0].center, x_c)),
            _ => None,
        };
        let tau = match (pointer, kick) {
            (Some(p), Some(k)) => match pointer_separation_time(k.k, p.mass, p.sigma)? {
                SeparationTime::Finite(t) => Some(t),
                SeparationTime::Never => None,
            },
            _ => None,
        };
        let t_final = match c.t_final {
            Some(t) => t,
            None => match tau {
                Some(tau) => t_cross + (3.0 * tau).max(3.0 * t_cross),
                None => 4.0 * t_cross,
            },
        };
        if t_final < window.t_hi {
            return Err(Error::NoCrossing { t_final, t_cross });
        }
        let t_read = tau.map(|tau| (t_cross + 3.0 * tau).min(t_final));

        // particle axis
        let spread = |p: &PacketSpec, t: f64| (p.center + p.momentum / PARTICLE_MASS * t).abs();
        let reach = |margin: f64| {
            packets
                .iter()
                .flat_map(|p| [0.0, t_final].map(|t| spread(p, t) + margin * width(p.sigma, PARTICLE_MASS, t)))
                .fold(0.0, f64::max)
        };
        let p_band = packets.iter().map(|p| p.max_momentum(HBAR)).fold(0.0, f64::max);
        let sigma_min = packets.iter().map(|p| p.sigma).fold(f64::INFINITY, f64::min);
        let dx_max = (std::f64::consts::PI / (4.0 * p_band)).min(sigma_min / 2.5);
        let ax = sized_axis(c.grid.points, c.grid.extent, reach(6.0) + 4.0, dx_max, MIN_PARTICLE_POINTS, PARTICLE_MASS)?;
        if reach(4.0) > 0.5 * ax.extent {
            return Err(Error::BoundaryProximity(format!(
                "particle packets reach |x| = {:.2} (4 sigma) but the grid ends at {:.2}",
                reach(4.0),
                0.5 * ax.extent
            )));
        }
        let mut axes = vec![ax];

        if let (Some(p), Some(k)) = (pointer, kick) {
            let (s_in, s_out) = k.sign_rule.signs();
            let k_eff = k.k * s_in.abs().max(s_out.abs());
            let drift = k_eff / p.mass * (t_final - k.t_apply).max(0.0);
            let wy = width(p.sigma, p.mass, t_final);
            let band = k_eff + 4.0 * HBAR / (2.0 * p.sigma);
            let dy_max = (std::f64::consts::PI / (4.0 * band)).min(p.sigma / 2.5);
            let ay = sized_axis(
                c.grid.pointer_points,
                c.grid.pointer_extent,
                drift + 6.0 * wy + 4.0,
                dy_max,
                MIN_POINTER_POINTS,
                p.mass,
            )?;
            if drift + 4.0 * wy > 0.5 * ay.extent {
                return Err(Error::BoundaryProximity(format!(
                    "pointer reaches |y| = {:.2} (4 sigma) but the grid ends at {:.2}",
                    drift + 4.0 * wy,
                    0.5 * ay.extent
                )));
            }
            axes.push(ay);
        }
        let grid = Grid::with_auto_dt(axes, HBAR)?;
        for p in &packets {
            p.check(&grid, 0)?;
        }
        if let (Some(p), Some(k)) = (pointer, kick) {
            let (s_in, s_out) = k.sign_rule.signs();
            PacketSpec::new(0.0, k.k * s_in.abs().max(s_out.abs()), p.sigma).check(&grid, 1)?;
            k.mask(&grid.axes[0])?;
        }
        Ok(Self {
            packets,
            pointer,
            kick,
            t_cross,
            x_c,
            window,
            tau,
            t_read,
            t_final,
            grid,
            n: c.ensemble.n.unwrap_or(5000),
            seed: c.seed(),
            dt: c.grid.dt.unwrap_or(0.005),
        })
    }

    pub fn tau_ratio(&self) -> Option<f64> {
        self.tau.map(|t| t / self.t_cross)
    }

    pub fn regime(&self) -> Regime {
        match (self.pointer, self.tau_ratio()) {
            (None, _) => Regime::NoPointer,
            (Some(_), None) => Regime::Uncoupled,
            (Some(_), Some(r)) => Regime::from_ratio(r),
        }
    }

    /// Equal-weight superposition of the two modes, each times the pointer's
    /// ready state when there is one, with the kick scheduled.
    pub fn history(&self) -> Result<FieldHistory> {
        let w = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let specs = |p: PacketSpec| match self.pointer {
            Some(ptr) => vec![p, PacketSpec::new(0.0, 0.0, ptr.sigma)],
            None => vec![p],
        };
        let field = SeparableField::from_packets(&self.grid, &[(w, specs(self.packets[0])), (w, specs(self.packets[1]))])?;
        FieldHistory::separable(field, &self.kick.into_iter().collect::<Vec<_>>())
    }

    pub fn integrator(&self) -> IntegratorConfig {
        let coarse = (COARSE_FACTOR * self.dt).max(self.t_final / MAX_COARSE_STEPS);
        let mut cfg = IntegratorConfig::uniform(coarse, self.t_final, RECORDS);
        cfg.dt_fine = self.dt;
        cfg.fine_window = Some((self.window.t_lo, self.window.t_hi));
        cfg.record_times.extend([self.t_cross, self.window.t_hi]);
        cfg.record_times.extend(self.t_read);
        cfg.record_times.sort_by(f64::total_cmp);
        cfg.record_times.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        cfg
    }

    /// Times at which the ensemble is compared with `|psi|^2`.
    pub fn checkpoints(&self) -> Vec<f64> {
        let mut t = vec![0.0, self.t_cross, self.window.t_hi, self.t_final];
        t.extend(self.t_read);
        t.sort_by(f64::total_cmp);
        t.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        t
    }

    /// Pointer displacement of each mode's branch at time `t`.
    fn displacements(&self, t: f64) -> Option<[f64; 2]> {
        let (p, k) = (self.pointer?, self.kick?);
        let mask = k.mask(&self.grid.axes[0]).ok()?;
        let (s_in, s_out) = k.sign_rule.signs();
        let ax = self.grid.axes[0];
        let dt = (t - k.t_apply).max(0.0);
        Some(self.packets.map(|pk| {
            let at = pk.center + pk.momentum / PARTICLE_MASS * k.t_apply;
            let i = (((at - ax.start()) / ax.dx()).round().max(0.0) as usize).min(ax.points - 1);
            let s = if mask[i] { s_in } else { s_out };
            s * k.k / p.mass * dt
        }))
    }
}

/// Default region: the half-line on mode 1's side of the crossing point.
fn kick_spec(k: &KickConfig, mode1_center: f64, x_c: f64) -> KickSpec {
    let region = match k.region {
        Some([lo, hi]) => (lo, hi),
        None if mode1_center < x_c => (f64::NEG_INFINITY, x_c),
        None => (x_c, f64::INFINITY),
    };
    KickSpec { k: k.k, region, sign_rule: k.sign_rule, t_apply: k.t_apply }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointerReadout {
    pub t_read: f64,
    pub threshold: f64,
    pub samples: usize,
    /// Pearson correlation of the path (+1 for mode 1) with the pointer
    /// reading (+1 when it points to mode 1).
    pub correlation: Option<f64>,
    /// Share of samples whose pointer names the mode they did not start in.
    pub surreal_fraction: f64,
    pub surrealism: bool,
    /// Total-variation distance between the two modes' pointer states.
    pub distinguishability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub regime: Regime,
    pub t_cross: f64,
    pub x_c: f64,
    pub tau: Option<f64>,
    pub tau_ratio: Option<f64>,
    pub t_final: f64,
    pub samples: usize,
    pub excluded: usize,
    pub inconclusive: usize,
    pub bounce: Proportion,
    /// Counts indexed `[path mode - 1][detector - 1]` over conclusive samples.
    pub detector_path: [[usize; 2]; 2],
    pub pointer: Option<PointerReadout>,
    pub crossing: CrossingReport,
    pub equivariance: Vec<KsCheck>,
    /// Probability dropped when the kick split the branches.
    pub discarded: f64,
    pub axes: Vec<Axis>,
    pub source: String,
    pub verdicts: Vec<Verdict>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SemiRun {
    pub setup: SemiSetup,
    pub report: RegimeReport,
    /// Per-sample label, `None` when inconclusive or excluded.
    #[serde(skip)]
    pub labels: Vec<Option<BounceClass>>,
    #[serde(skip)]
    pub ensemble: Ensemble,
}

impl PartialEq for SemiRun {
    fn eq(&self, other: &Self) -> bool {
        self.setup == other.setup && self.report == other.report && self.ensemble == other.ensemble
    }
}

pub fn run_semi(config: &ScenarioConfig) -> Result<SemiRun> {
    let setup = SemiSetup::from_config(config)?;
    run_setup(setup)
}

pub fn run_setup(setup: SemiSetup) -> Result<SemiRun> {
    let history = setup.history()?;
    let start = history.snapshot_at(0.0);
    let initial = sample_initial(start.as_ref(), setup.n, setup.seed, history.label())?;
    let ensemble = integrate(&initial, &history, setup.t_final, &setup.integrator())?;
    let report = analyse(&setup, &history, &ensemble)?;
    let labels = ensemble
        .trajectories
        .iter()
        .map(|t| if t.flags.excluded() { None } else { classify_bounce(t, &setup.window).ok() })
        .collect();
    Ok(SemiRun { setup, report, labels, ensemble })
}

fn side(x: f64, x_c: f64) -> f64 {
    if x < x_c {
        -1.0
    } else {
        1.0
    }
}

fn analyse(setup: &SemiSetup, history: &FieldHistory, ensemble: &Ensemble) -> Result<RegimeReport> {
    let w = &setup.window;
    let mode1_side = side(setup.packets[0].center, w.x_c);
    let mut bounced = 0;
    let mut conclusive = 0;
    let mut detector_path = [[0usize; 2]; 2];
    for tr in ensemble.live() {
        let Ok(class) = classify_bounce(tr, w) else { continue };
        conclusive += 1;
        bounced += (class == BounceClass::Bounced) as usize;
        let path = if side(tr.start()[0], w.x_c) == mode1_side { 0 } else { 1 };
        let det = if side(tr.end()[0], w.x_c) == mode1_side { 1 } else { 0 };
        detector_path[path][det] += 1;
    }
    let live = ensemble.len() - ensemble.excluded();
    let inconclusive = live - conclusive;
    let bounce = wilson(bounced, conclusive);
    let pointer = readout(setup, history, ensemble, mode1_side)?;
    let crossing = check_no_crossing(ensemble);
    let equivariance = equivariance(ensemble, history, &setup.checkpoints(), 1.0)?;

    let regime = setup.regime();
    let excluded = ensemble.excluded();
    let mut verdicts = vec![
        Verdict::at_most(
            "equivariance",
            equivariance.iter().map(|k| k.statistic / k.threshold).fold(0.0, f64::max),
            1.0,
            "largest KS statistic over its 99% threshold",
        ),
        Verdict::at_most("excluded_fraction", excluded as f64 / ensemble.len() as f64, MAX_EXCLUDED, "trapped or lost samples"),
        Verdict::at_most(
            "configuration_crossings",
            crossing.config_crossings as f64,
            0.0,
            "crossings of distinct trajectories in configuration space",
        ),
    ];
    let surreal = pointer.as_ref().map(|p| p.surrealism);
    match regime {
        Regime::NoPointer => {
            verdicts.push(Verdict::at_least("all_bounce", bounce.estimate, 1.0, "bounce fraction without a pointer"));
            verdicts.push(Verdict::at_most(
                "detector1_only_from_mode2",
                (detector_path[0][0] + detector_path[1][1]) as f64,
                0.0,
                "conclusive samples where detector 1 fired for a mode-1 path or detector 2 for mode 2",
            ));
        }
        Regime::Fast => {
            verdicts.push(Verdict::at_most("fast_bounce", bounce.estimate, 0.01, "bounce fraction, fast pointer"));
            verdicts.push(Verdict::at_least(
                "fast_correlation",
                pointer.as_ref().and_then(|p| p.correlation).unwrap_or(f64::NAN),
                0.99,
                "pointer-path correlation",
            ));
            verdicts.push(Verdict::flag("fast_not_surreal", surreal == Some(false), "pointer names the path taken"));
        }
        Regime::Slow => {
            verdicts.push(Verdict::at_least("slow_bounce", bounce.estimate, 0.99, "bounce fraction, slow pointer"));
            verdicts.push(Verdict::flag("slow_surreal", surreal == Some(true), "pointer names the path not taken"));
        }
        Regime::Intermediate | Regime::Uncoupled => {}
    }
    Ok(RegimeReport {
        regime,
        t_cross: setup.t_cross,
        x_c: setup.x_c,
        tau: setup.tau,
        tau_ratio: setup.tau_ratio(),
        t_final: setup.t_final,
        samples: ensemble.len(),
        excluded,
        inconclusive,
        bounce,
        detector_path,
        pointer,
        crossing,
        equivariance,
        discarded: history.discarded(),
        axes: setup.grid.axes.clone(),
        source: history.label().to_string(),
        verdicts,
    })
}

fn readout(setup: &SemiSetup, history: &FieldHistory, ensemble: &Ensemble, mode1_side: f64) -> Result<Option<PointerReadout>> {
    let Some(t_read) = setup.t_read else { return Ok(None) };
    let Some([d1, d2]) = setup.displacements(t_read) else { return Ok(None) };
    let threshold = 0.5 * (d1 + d2);
    let towards1 = (d1 - d2).signum();
    let (mut path, mut reading) = (Vec::new(), Vec::new());
    for tr in ensemble.live() {
        let Some(k) = tr.times.iter().position(|t| (t - t_read).abs() < 1e-9) else { continue };
        path.push(if side(tr.start()[0], setup.x_c) == mode1_side { 1.0 } else { -1.0 });
        reading.push(if (tr.positions[k][1] - threshold) * towards1 > 0.0 { 1.0 } else { -1.0 });
    }
    let samples = path.len();
    let disagree = path.iter().zip(&reading).filter(|(a, b)| a != b).count();
    let surreal_fraction = if samples > 0 { disagree as f64 / samples as f64 } else { f64::NAN };
    let distinguishability = match history.separable_at(t_read) {
        Some(f) => pointer_distinguishability(&f, threshold, towards1)?,
        None => f64::NAN,
    };
    Ok(Some(PointerReadout {
        t_read,
        threshold,
        samples,
        correlation: pearson(&path, &reading),
        surreal_fraction,
        surrealism: surreal_fraction > 0.5,
        distinguishability,
    }))
}

/// Branches are grouped by which side of `threshold` their pointer factor
/// sits on; the result is the TV distance between the two groups' pointer
/// densities.
fn pointer_distinguishability(f: &SeparableField, threshold: f64, towards1: f64) -> Result<f64> {
    let ay = f.grid.axes[1];
    let dy = ay.dx();
    let mut groups = [vec![0.0; ay.points], vec![0.0; ay.points]];
    for b in &f.branches {
        let g = &b.factors[1];
        let dens: Vec<f64> = g.iter().map(|v| v.norm_sqr()).collect();
        let mass: f64 = dens.iter().sum();
        let centroid = dens.iter().enumerate().map(|(i, d)| ay.x(i) * d).sum::<f64>() / mass;
        let gi = if (centroid - threshold) * towards1 > 0.0 { 0 } else { 1 };
        let w = b.weight.norm_sqr();
        groups[gi].iter_mut().zip(&dens).for_each(|(acc, d)| *acc += w * d);
    }
    match tv_distance(&groups[0], &groups[1], dy) {
        Ok(d) => Ok(d),
        Err(Error::BranchTooSmall(_)) => Ok(0.0),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    pub pointer_mass: f64,
    pub k: f64,
    pub report: RegimeReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub param: SweepParam,
    pub points: Vec<SweepPoint>,
    /// Bounce fraction never decreases along the sweep (recorded, not required).
    pub bounce_nondecreasing: bool,
    pub verdicts: Vec<Verdict>,
}

/// Bounce strictly between the regimes, with the whole interval inside (0.05, 0.95).
pub fn is_intermediate(b: &Proportion) -> bool {
    b.ci.0 > 0.05 && b.ci.1 < 0.95
}

/// Config for one sweep point.
pub fn sweep_point_config(config: &ScenarioConfig, t_cross: f64, param: SweepParam, value: f64) -> ScenarioConfig {
    let mut c = config.resolved();
    c.kind = Kind::Semi;
    c.sweep = None;
    let mut kick = c.kick.unwrap_or_default();
    let mut pointer = c.pointer.unwrap_or_default();
    match param {
        SweepParam::TauRatio => pointer.mass = value * t_cross * kick.k / pointer.sigma,
        SweepParam::Mass => pointer.mass = value,
        SweepParam::K => kick.k = value,
    }
    c.kick = Some(kick);
    c.pointer = Some(pointer);
    c
}

pub fn run_pointer_sweep(config: &ScenarioConfig) -> Result<SweepReport> {
    if config.kind != Kind::PointerSweep {
        return Err(Error::Config(format!("expected a pointer-sweep scenario, got {}", config.kind.name())));
    }
    config.validate()?;
    let c = config.resolved();
    let sweep = c.sweep.clone().unwrap_or_default();
    if sweep.values.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let base = SemiSetup::from_config(&{
        let mut b = c.clone();
        b.kind = Kind::Semi;
        b.sweep = None;
        b.t_final = None;
        b
    })?;
    let mut points = Vec::with_capacity(sweep.values.len());
    for &v in &sweep.values {
        let pc = sweep_point_config(&c, base.t_cross, sweep.param, v);
        let run = run_semi(&pc)?;
        points.push(SweepPoint {
            value: v,
            pointer_mass: pc.pointer.map(|p| p.mass).unwrap_or(f64::NAN),
            k: pc.kick.map(|k| k.k).unwrap_or(f64::NAN),
            report: run.report,
        });
    }
    let mut by_value: Vec<(f64, f64)> = points.iter().map(|p| (p.value, p.report.bounce.estimate)).collect();
    by_value.sort_by(|a, b| a.0.total_cmp(&b.0));
    let bounce_nondecreasing = by_value.windows(2).all(|w| w[1].1 >= w[0].1);
    let mut verdicts = Vec::new();
    if points.len() >= 3 {
        let best = points
            .iter()
            .map(|p| (p.report.bounce.ci.0 - 0.05).min(0.95 - p.report.bounce.ci.1))
            .fold(f64::NEG_INFINITY, f64::max);
        verdicts.push(Verdict {
            name: "intermediate_exists".into(),
            pass: points.iter().any(|p| is_intermediate(&p.report.bounce)),
            value: best,
            limit: 0.0,
            detail: "some point has its bounce interval inside (0.05, 0.95)".into(),
        });
    }
    Ok(SweepReport { param: sweep.param, points, bounce_nondecreasing, verdicts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn semi(n: usize) -> ScenarioConfig {
        let mut c = ScenarioConfig::new(Kind::Semi);
        c.ensemble.n = Some(n);
        c
    }

    #[test]
    fn default_geometry() {
        let s = SemiSetup::from_config(&semi(10)).unwrap();
        assert!((s.t_cross - 2.0).abs() < 1e-12 && s.x_c.abs() < 1e-12);
        assert_eq!(s.regime(), Regime::NoPointer);
        assert_eq!(s.t_final, 8.0);
        assert_eq!(s.grid.dims(), 1);
        let mut c = semi(10);
        c.pointer = Some(PointerSpec { mass: 80.0, sigma: 1.0 });
        let s = SemiSetup::from_config(&c).unwrap();
        assert_eq!(s.tau_ratio(), Some(10.0));
        assert_eq!(s.regime(), Regime::Slow);
        assert_eq!(s.t_read, Some(62.0));
        assert_eq!(s.displacements(2.0), Some([0.1, -0.1]));
    }

    #[test]
    fn diverging_packets_never_cross() {
        let mut c = semi(10);
        c.packets = Some(vec![PacketSpec::new(-8.0, -4.0, 1.0), PacketSpec::new(8.0, 4.0, 1.0)]);
        assert!(matches!(SemiSetup::from_config(&c), Err(Error::NoCrossing { .. })));
        let mut c = semi(10);
        c.t_final = Some(1.0);
        assert!(matches!(SemiSetup::from_config(&c), Err(Error::NoCrossing { .. })));
    }

    #[test]
    fn narrow_packet_and_small_grid_are_physics_errors() {
        let mut c = semi(10);
        c.grid.points = Some(256);
        c.grid.extent = Some(200.0);
        assert!(matches!(SemiSetup::from_config(&c), Err(Error::PacketTooNarrow { .. })));
        let mut c = semi(10);
        c.grid.extent = Some(30.0);
        assert!(matches!(SemiSetup::from_config(&c), Err(Error::BoundaryProximity(_))));
    }

    #[test]
    fn small_no_pointer_run_bounces() {
        let r = run_semi(&semi(300)).unwrap();
        assert_eq!(r.report.bounce.successes, r.report.bounce.trials);
        assert!(r.report.crossing.no_crossing());
        assert_eq!(r.labels.len(), 300);
    }

    #[test]
    fn empty_sweep_is_rejected() {
        let mut c = ScenarioConfig::new(Kind::PointerSweep);
        c.sweep = Some(super::super::config::SweepSpec { param: SweepParam::K, values: vec![] });
        assert!(matches!(run_pointer_sweep(&c), Err(Error::EmptyGrid)));
    }
}
