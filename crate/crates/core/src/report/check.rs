//! The invariant suite behind `pwlab check`.
//!
//! Tolerances on exact identities and numerical errors are multiplied by
//! `tol_scale`; statistical lower bounds are not.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::experiments::bell::{first_marginal_drift, second_marginal_drift, SWEEP_POINTS};
use crate::experiments::semi::{is_intermediate, sweep_point_config};
use crate::experiments::{run_semi, Kind, RegimeReport, ScenarioConfig, SemiSetup, SweepParam, Verdict};
use crate::joint::{chsh_from_samples, empirical_joint, l1_distance, sample_outcomes, signalling_gap, two_time_joint, Settings};
use crate::mode::coherent::{classical_bs_transform, ebs_transform, CoherentTwoMode};
use crate::mode::{bell_pipeline, chsh, detection_probs, BASIS};
use crate::wave::oracle::{l2_distance, CrankNicolson};
use crate::wave::{init_gaussian, superpose, Axis, Grid, PacketSpec, WaveField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckOptions {
    pub tol_scale: f64,
    /// Adds the slow-pointer scenario, which takes about a minute.
    pub full: bool,
    pub seed: u64,
    /// Ensemble size for the trajectory scenarios.
    pub samples: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { tol_scale: 1.0, full: false, seed: 1, samples: 5000 }
    }
}

/// Pointer ratios used by the suite.
pub const FAST_CHECK_RATIO: f64 = 0.1;
pub const INTERMEDIATE_CHECK_RATIO: f64 = 1.0;
pub const SLOW_CHECK_RATIO: f64 = 100.0;

struct Suite<'a> {
    scale: f64,
    out: Vec<Verdict>,
    hook: &'a mut dyn FnMut(&Verdict),
}

impl Suite<'_> {
    fn push(&mut self, v: Verdict) {
        (self.hook)(&v);
        self.out.push(v);
    }

    fn tol(&mut self, name: &str, value: f64, limit: f64, detail: &str) {
        self.push(Verdict::at_most(name, value, limit * self.scale, detail));
    }

    fn floor(&mut self, name: &str, value: f64, limit: f64, detail: &str) {
        self.push(Verdict::at_least(name, value, limit, detail));
    }
}

/// Runs the suite; `hook` sees each verdict as soon as it is decided.
pub fn run_checks(opts: &CheckOptions, hook: &mut dyn FnMut(&Verdict)) -> Result<Vec<Verdict>> {
    let mut s = Suite { scale: opts.tol_scale, out: Vec::new(), hook };
    mode_checks(&mut s)?;
    joint_checks(&mut s, opts.seed);
    wave_checks(&mut s)?;
    semi_checks(&mut s, opts)?;
    Ok(s.out)
}

/// The eight written terms of the post-beam-splitter state, summed by basis label.
pub fn written_pipeline_state(x: f64, y: f64) -> [C64; 4] {
    let e = C64::from_polar(1.0, x + y);
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let terms: [((u8, u8), C64); 8] = [
        ((1, 4), e),
        ((2, 4), i * e),
        ((1, 3), i * e),
        ((2, 3), -e),
        ((2, 3), one),
        ((2, 4), i),
        ((1, 3), i),
        ((1, 4), -one),
    ];
    let mut out = [C64::new(0.0, 0.0); 4];
    for (ab, t) in terms {
        let k = BASIS.iter().position(|&b| b == ab).expect("basis label");
        out[k] += t / 2f64.powf(1.5);
    }
    out
}

fn grid_points(n: usize) -> impl Iterator<Item = (f64, f64)> {
    (0..n).flat_map(move |i| (0..n).map(move |j| (TAU * i as f64 / n as f64 - PI, TAU * j as f64 / n as f64 - PI)))
}

fn mode_checks(s: &mut Suite) -> Result<()> {
    let mut termwise = 0.0f64;
    let mut law = 0.0f64;
    for (x, y) in grid_points(10) {
        let got = bell_pipeline(x, y);
        let want = written_pipeline_state(x, y);
        for k in 0..4 {
            termwise = termwise.max((got.amps()[k] - want[k]).norm());
        }
        let t = detection_probs(&got);
        let (same, diff) = ((1.0 + (x + y).cos()) / 4.0, (1.0 - (x + y).cos()) / 4.0);
        for (a, b, p) in [(1, 3, same), (2, 4, same), (1, 4, diff), (2, 3, diff)] {
            law = law.max((t.get(a, b) - p).abs());
        }
    }
    s.tol("mode.state_termwise", termwise, 1e-12, "pipeline amplitudes vs the written eight-term state, 100 settings");
    s.tol("mode.coincidence_law", law, 1e-12, "P13 = P24 = (1+cos)/4, P14 = P23 = (1-cos)/4 on a 10x10 grid");
    s.tol(
        "mode.chsh_analytic",
        (chsh(0.0, FRAC_PI_2, -FRAC_PI_4, FRAC_PI_4) - 2.0 * 2f64.sqrt()).abs(),
        1e-9,
        "S at (0, pi/2, -pi/4, pi/4) vs 2 sqrt 2",
    );

    let alpha = C64::new(2.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let out = ebs_transform(&CoherentTwoMode::product(alpha, zero))?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let want = [(C64::new(h, 0.0), alpha, zero), (C64::new(0.0, h), zero, alpha)];
    let mut err = if out.branches.len() == 2 { 0.0f64 } else { f64::INFINITY };
    for (b, (w, a1, a2)) in out.branches.iter().zip(want) {
        err = err.max((b.weight - w).norm()).max((b.alpha1 - a1).norm()).max((b.alpha2 - a2).norm());
    }
    s.tol("mode.ebs_branches", err, 1e-12, "|2,0> -> (|2,0> + i|0,2>)/sqrt 2");
    let lin = classical_bs_transform(&CoherentTwoMode::product(alpha, zero));
    s.push(Verdict::flag(
        "mode.ebs_differs_from_linear_bs",
        out.fidelity(&lin) < 1.0 - 1e-6,
        format!("fidelity {:.6} at alpha = 2", out.fidelity(&lin)),
    ));
    Ok(())
}

fn joint_checks(s: &mut Suite, seed: u64) {
    let est = chsh_from_samples(0.0, FRAC_PI_2, -FRAC_PI_4, FRAC_PI_4, 100_000, seed);
    s.tol(
        "joint.chsh_sampled_within_3se",
        (est.s - 2.0 * 2f64.sqrt()).abs() / est.std_err,
        3.0,
        "Monte Carlo S, 1e5 per pair, in standard errors",
    );
    s.floor("joint.chsh_sampled_above_2", est.sigmas_above_classical(), 5.0, "standard errors above 2");

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut first, mut second) = (0.0f64, 0.0f64);
    for _ in 0..5 {
        let (x, xp, y) = (rng.random::<f64>() * TAU, rng.random::<f64>() * TAU, rng.random::<f64>() * TAU);
        first = first.max(first_marginal_drift(x, y, SWEEP_POINTS));
        second = second.max(second_marginal_drift(xp, y, SWEEP_POINTS));
    }
    s.tol("joint.first_marginal_ignores_xp", first, 1e-12, "50-point sweeps of x' at 5 settings");
    s.tol("joint.second_marginal_ignores_x", second, 1e-12, "50-point sweeps of x at 5 settings");
    let gap = signalling_gap(0.0, 0.0, &[0.0, FRAC_PI_2]).unwrap_or(f64::NAN);
    s.tol("joint.signalling_gap", (gap - 0.25).abs(), 1e-12, "gap at x = x' = 0 between y = 0 and pi/2 vs 1/4");

    let mut worst = 0.0f64;
    for k in 0..5u64 {
        let set = Settings::new(rng.random::<f64>() * TAU, rng.random::<f64>() * TAU, rng.random::<f64>() * TAU);
        let emp = empirical_joint(&set, &sample_outcomes(&set, 100_000, seed.wrapping_add(k << 40)));
        worst = worst.max(l1_distance(&emp, &two_time_joint(set.x, set.xp, set.y)));
    }
    s.tol("joint.sampler_l1", worst, 0.01, "largest L1 distance over 5 settings, 1e5 samples each");
}

/// Split-step against Crank-Nicolson over 1000 steps of a moving packet.
pub fn split_step_vs_crank_nicolson() -> Result<f64> {
    let grid = Grid::new(vec![Axis::new(1024, 60.0, 1.0)?], 2e-3, 1.0)?;
    let f0 = init_gaussian(&grid, &[PacketSpec::new(-5.0, 1.0, 1.0)])?;
    let mut split = f0.clone();
    for _ in 0..1000 {
        split.propagate(grid.dt, None);
    }
    let cn = CrankNicolson::new(&f0, grid.dt, 8, None)?.evolve(&f0, 1000);
    l2_distance(&split, &cn)
}

/// Relative error of the spread width against the closed form.
pub fn dispersion_error() -> Result<f64> {
    let grid = Grid::new(vec![Axis::new(2048, 80.0, 1.0)?], 0.01, 1.0)?;
    let spec = PacketSpec::new(-3.0, 1.0, 1.0);
    let mut f = init_gaussian(&grid, &[spec])?;
    let mut worst = 0.0f64;
    for t in [1.0, 2.0, 4.0] {
        f.propagate(t - f.time, None);
        let (_, width) = f.position_moments(0);
        worst = worst.max((width / spec.width_at(t, 1.0, 1.0) - 1.0).abs());
    }
    Ok(worst)
}

/// Guidance velocity from the spectral gradient against an 8th-order
/// finite difference, relative to the largest speed on the support.
pub fn velocity_gradient_error() -> Result<f64> {
    let grid = Grid::new(vec![Axis::new(1024, 60.0, 1.0)?], 0.01, 1.0)?;
    let a = init_gaussian(&grid, &[PacketSpec::new(-3.0, 2.0, 1.0)])?;
    let b = init_gaussian(&grid, &[PacketSpec::new(3.0, -2.0, 1.0)])?;
    let mut f: WaveField = superpose(&[(C64::new(1.0, 0.0), &a), (C64::new(1.0, 0.0), &b)])?.field;
    f.propagate(1.2, None);
    let spectral = f.gradient(0);
    let dx = grid.axes[0].dx();
    let c = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let n = f.amps.len();
    let peak = f.amps.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    let (mut diff, mut scale) = (0.0f64, 0.0f64);
    for i in 4..n - 4 {
        if f.amps[i].norm_sqr() < 1e-3 * peak {
            continue;
        }
        let fd: C64 = c.iter().enumerate().map(|(m, w)| (f.amps[i + m + 1] - f.amps[i - m - 1]) * *w).sum::<C64>() / dx;
        let v_s = (spectral[i] / f.amps[i]).im;
        let v_fd = (fd / f.amps[i]).im;
        diff = diff.max((v_s - v_fd).abs());
        scale = scale.max(v_s.abs());
    }
    Ok(diff / scale.max(1e-300))
}

fn wave_checks(s: &mut Suite) -> Result<()> {
    s.tol("wave.split_step_vs_crank_nicolson", split_step_vs_crank_nicolson()?, 1e-5, "L2 distance after 1000 steps");
    s.tol("wave.free_dispersion", dispersion_error()?, 1e-6, "relative width error at t = 1, 2, 4");
    s.tol("traj.spectral_vs_fd_velocity", velocity_gradient_error()?, 1e-6, "relative velocity difference");
    Ok(())
}

fn semi_config(opts: &CheckOptions, ratio: Option<f64>) -> Result<ScenarioConfig> {
    let mut c = ScenarioConfig::new(Kind::Semi);
    c.ensemble.n = Some(opts.samples);
    c.ensemble.seed = Some(opts.seed);
    let Some(r) = ratio else { return Ok(c) };
    let t_cross = SemiSetup::from_config(&c)?.t_cross;
    Ok(sweep_point_config(&c, t_cross, SweepParam::TauRatio, r))
}

fn common(s: &mut Suite, tag: &str, r: &RegimeReport) {
    let ks = r.equivariance.iter().map(|k| k.statistic / k.threshold).fold(0.0, f64::max);
    s.tol(&format!("{tag}.equivariance"), ks, 1.0, &format!("largest KS / (1.63/sqrt N) over {} checks", r.equivariance.len()));
    s.tol(&format!("{tag}.configuration_crossings"), r.crossing.config_crossings as f64, 0.0, "trajectory crossings");
}

fn semi_checks(s: &mut Suite, opts: &CheckOptions) -> Result<()> {
    let r = run_semi(&semi_config(opts, None)?)?.report;
    common(s, "semi.no_pointer", &r);
    s.tol("semi.no_pointer.crossed_fraction", 1.0 - r.bounce.estimate, 0.0, "share of conclusive samples that crossed");
    s.tol(
        "semi.no_pointer.detector_path_mismatch",
        (r.detector_path[0][0] + r.detector_path[1][1]) as f64,
        0.0,
        "detector 1 fired for a mode-1 path or detector 2 for mode 2",
    );

    let r = run_semi(&semi_config(opts, Some(FAST_CHECK_RATIO))?)?.report;
    common(s, "semi.fast", &r);
    s.tol("semi.fast.bounce", r.bounce.estimate, 0.01, "bounce fraction at tau/T = 0.1");
    let corr = r.pointer.as_ref().and_then(|p| p.correlation).unwrap_or(f64::NAN);
    s.floor("semi.fast.correlation", corr, 0.99, "pointer-path correlation");

    let r = run_semi(&semi_config(opts, Some(INTERMEDIATE_CHECK_RATIO))?)?.report;
    common(s, "semi.intermediate", &r);
    s.push(Verdict::flag(
        "semi.intermediate.partial_bounce",
        is_intermediate(&r.bounce),
        format!("bounce {:.4}, 95% interval [{:.4}, {:.4}] at tau/T = 1", r.bounce.estimate, r.bounce.ci.0, r.bounce.ci.1),
    ));

    if opts.full {
        let r = run_semi(&semi_config(opts, Some(SLOW_CHECK_RATIO))?)?.report;
        common(s, "semi.slow", &r);
        s.floor("semi.slow.bounce", r.bounce.estimate, 0.99, "bounce fraction at tau/T = 100");
        s.push(Verdict::flag(
            "semi.slow.surrealism",
            r.pointer.as_ref().is_some_and(|p| p.surrealism),
            "pointer names the mode the particle did not take",
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerical_oracles_hold() {
        let cn = split_step_vs_crank_nicolson().unwrap();
        let disp = dispersion_error().unwrap();
        let vel = velocity_gradient_error().unwrap();
        println!("cn {cn:e} dispersion {disp:e} velocity {vel:e}");
        assert!(cn < 1e-5 && disp < 1e-6 && vel < 1e-6);
    }

    #[test]
    fn zero_scale_breaks_exact_checks() {
        let mut seen = 0;
        let mut hook = |_: &Verdict| seen += 1;
        let out = {
            let mut s = Suite { scale: 0.0, out: Vec::new(), hook: &mut hook };
            mode_checks(&mut s).unwrap();
            s.out
        };
        assert_eq!(seen, out.len());
        assert!(out.iter().any(|v| !v.pass));
    }
}
