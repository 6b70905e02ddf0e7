//! Bell test and two-time statistics at the mode level.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::config::{Kind, ScenarioConfig};
use super::Verdict;
use crate::error::{Error, Result};
use crate::joint::{
    alice_two_time, chsh_from_samples, empirical_joint, l1_distance, marginal_first, marginal_second, sample_outcomes,
    two_time_joint, ChshEstimate, Settings, Table2, TwoTimeJoint,
};
use crate::mode::{bell_pipeline, chsh, detection_probs, CoincidenceTable, BASIS};

/// Coincidence table for one setting pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTable {
    pub x: f64,
    pub y: f64,
    pub analytic: CoincidenceTable,
    /// Relative frequencies in [`BASIS`] order.
    pub sampled: Option<[f64; 4]>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellReport {
    pub phases: [f64; 4],
    /// Pairs (x,y), (x,y'), (x',y), (x',y').
    pub tables: Vec<PairTable>,
    pub chsh_analytic: f64,
    pub chsh_sampled: Option<ChshEstimate>,
    pub verdicts: Vec<Verdict>,
}

fn check_kind(c: &ScenarioConfig, k: Kind) -> Result<()> {
    if c.kind != k {
        return Err(Error::Config(format!("expected a {} scenario, got {}", k.name(), c.kind.name())));
    }
    Ok(())
}

pub fn run_bell(config: &ScenarioConfig) -> Result<BellReport> {
    check_kind(config, Kind::Bell)?;
    let c = config.resolved();
    let (x, xp, y, yp) = c.phases4();
    let n = c.ensemble.n.unwrap_or(0);
    let seed = c.seed();
    let pairs = [(x, y), (x, yp), (xp, y), (xp, yp)];
    let mut tables = Vec::with_capacity(4);
    let mut verdicts = Vec::new();
    for (k, &(u, v)) in pairs.iter().enumerate() {
        let analytic = detection_probs(&bell_pipeline(u, v));
        let sampled = (n > 0).then(|| {
            // same sub-seeds as the CHSH estimate, so the tables and S agree
            let outs = sample_outcomes(&Settings::new(u, 0.0, v), n, seed.wrapping_add((k as u64) << 40));
            let mut counts = [0usize; 4];
            for o in &outs {
                counts[BASIS.iter().position(|&(a, b)| a == o.a && b == o.b).expect("outcome in basis")] += 1;
            }
            counts.map(|c| c as f64 / n as f64)
        });
        if let Some(f) = sampled {
            let forbidden = analytic.p.iter().zip(f).filter(|(p, _)| **p < 1e-15).fold(0.0, |acc, (_, s)| acc + s);
            verdicts.push(Verdict::at_most(
                &format!("pair{k}_forbidden_never_sampled"),
                forbidden,
                0.0,
                "sampled frequency of outcomes with zero analytic probability",
            ));
        }
        verdicts.push(Verdict::at_most(
            &format!("pair{k}_normalized"),
            (analytic.total() - 1.0).abs(),
            1e-12,
            "analytic coincidence table sums to 1",
        ));
        tables.push(PairTable { x: u, y: v, analytic, sampled, samples: n });
    }
    let chsh_analytic = chsh(x, xp, y, yp);
    let chsh_sampled = (n > 0).then(|| chsh_from_samples(x, xp, y, yp, n, seed));
    if let Some(est) = &chsh_sampled {
        verdicts.push(Verdict::at_most(
            "chsh_sampled_within_3se",
            (est.s - chsh_analytic).abs() / est.std_err,
            3.0,
            "Monte Carlo CHSH vs analytic, in standard errors",
        ));
        if chsh_analytic > 2.0 {
            verdicts.push(Verdict::at_least(
                "chsh_violation_5se",
                est.sigmas_above_classical(),
                5.0,
                "standard errors by which the sampled S exceeds 2",
            ));
        }
    }
    Ok(BellReport { phases: [x, xp, y, yp], tables, chsh_analytic, chsh_sampled, verdicts })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AliceTable {
    pub y: f64,
    /// `[a-1][a'-1]`
    pub table: Table2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoTimeReport {
    pub settings: Settings,
    pub joint: TwoTimeJoint,
    /// `[a-1][b-3]`, summed over `a'`.
    pub marginal_first: Table2,
    /// `[a'-1][b-3]`, summed over `a`.
    pub marginal_second: Table2,
    /// Largest change of the first marginal as `x'` sweeps a full turn.
    pub first_drift: f64,
    /// Largest change of the second marginal as `x` sweeps a full turn.
    pub second_drift: f64,
    pub alice: Vec<AliceTable>,
    pub gap: f64,
    pub sampled: Option<TwoTimeJoint>,
    pub samples: usize,
    pub l1: Option<f64>,
    pub verdicts: Vec<Verdict>,
}

/// Number of points in the invariance sweeps.
pub const SWEEP_POINTS: usize = 50;

/// Tolerance on exact identities of the mode tables.
pub const EXACT_TOL: f64 = 1e-12;

fn table_diff(a: &Table2, b: &Table2) -> f64 {
    (0..2).flat_map(|i| (0..2).map(move |j| (a[i][j] - b[i][j]).abs())).fold(0.0, f64::max)
}

fn coincidence_table(x: f64, y: f64) -> Table2 {
    let c = detection_probs(&bell_pipeline(x, y));
    [[c.get(1, 3), c.get(1, 4)], [c.get(2, 3), c.get(2, 4)]]
}

/// Largest deviation of the first marginal from the coincidence law in
/// `(x, y)` while `x'` runs over a full turn.
pub fn first_marginal_drift(x: f64, y: f64, points: usize) -> f64 {
    let reference = coincidence_table(x, y);
    (0..points)
        .map(|i| {
            let xp = TAU * i as f64 / points as f64;
            table_diff(&marginal_first(&two_time_joint(x, xp, y)), &reference)
        })
        .fold(0.0, f64::max)
}

/// Largest deviation of the second marginal from the coincidence law in
/// `(x', y)` while `x` runs over a full turn.
pub fn second_marginal_drift(xp: f64, y: f64, points: usize) -> f64 {
    let reference = coincidence_table(xp, y);
    (0..points)
        .map(|i| {
            let x = TAU * i as f64 / points as f64;
            table_diff(&marginal_second(&two_time_joint(x, xp, y)), &reference)
        })
        .fold(0.0, f64::max)
}

/// L1 bound for the sampled table: 0.01 at 1e5 samples, scaled as `1/sqrt(n)`.
pub fn l1_limit(n: usize) -> f64 {
    0.01 * (1e5 / n.max(1) as f64).sqrt()
}

pub fn run_two_time(config: &ScenarioConfig) -> Result<TwoTimeReport> {
    check_kind(config, Kind::TwoTime)?;
    let c = config.resolved();
    let (x, xp, y, _) = c.phases4();
    let settings = Settings::new(x, xp, y);
    let joint = two_time_joint(x, xp, y);
    let y_grid = c.y_grid.clone().unwrap_or_default();
    if y_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let alice: Vec<AliceTable> =
        y_grid.iter().map(|&yy| AliceTable { y: yy, table: alice_two_time(&two_time_joint(x, xp, yy)) }).collect();
    let gap = crate::joint::signalling_gap(x, xp, &y_grid)?;
    let first_drift = first_marginal_drift(x, y, SWEEP_POINTS);
    let second_drift = second_marginal_drift(xp, y, SWEEP_POINTS);
    let n = c.ensemble.n.unwrap_or(0);
    let sampled = (n > 0).then(|| empirical_joint(&settings, &sample_outcomes(&settings, n, c.seed())));
    let l1 = sampled.as_ref().map(|s| l1_distance(s, &joint));
    let mut verdicts = vec![
        Verdict::at_most("table_normalized", (joint.total() - 1.0).abs(), EXACT_TOL, "joint table sums to 1"),
        Verdict::at_most(
            "first_marginal_independent_of_xp",
            first_drift,
            EXACT_TOL,
            format!("{SWEEP_POINTS}-point sweep of x'"),
        ),
        Verdict::at_most(
            "second_marginal_independent_of_x",
            second_drift,
            EXACT_TOL,
            format!("{SWEEP_POINTS}-point sweep of x"),
        ),
    ];
    if let Some(d) = l1 {
        verdicts.push(Verdict::at_most("sampled_l1", d, l1_limit(n), format!("{n} samples")));
    }
    Ok(TwoTimeReport {
        settings,
        joint,
        marginal_first: marginal_first(&joint),
        marginal_second: marginal_second(&joint),
        first_drift,
        second_drift,
        alice,
        gap,
        sampled,
        samples: n,
        l1,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::Phases;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn bell_defaults_violate_chsh() {
        let mut c = ScenarioConfig::new(Kind::Bell);
        c.ensemble.n = Some(20_000);
        let r = run_bell(&c).unwrap();
        assert!((r.chsh_analytic - crate::joint::TSIRELSON).abs() < 1e-9);
        assert!(r.verdicts.iter().all(|v| v.pass), "{:?}", r.verdicts);
        let est = r.chsh_sampled.unwrap();
        for (t, e) in r.tables.iter().zip(est.correlators) {
            let f = t.sampled.unwrap();
            assert!((f[0] + f[3] - f[1] - f[2] - e).abs() < 1e-9);
        }
    }

    #[test]
    fn bell_without_samples_is_analytic_only() {
        let mut c = ScenarioConfig::new(Kind::Bell);
        c.ensemble.n = Some(0);
        let r = run_bell(&c).unwrap();
        assert!(r.chsh_sampled.is_none() && r.tables.iter().all(|t| t.sampled.is_none()));
    }

    #[test]
    fn two_time_gap_and_marginals() {
        let mut c = ScenarioConfig::new(Kind::TwoTime);
        c.phases = Phases { x: Some(0.0), xp: Some(0.0), y: Some(0.0), yp: None };
        c.y_grid = Some(vec![0.0, FRAC_PI_2]);
        c.ensemble.n = Some(10_000);
        let r = run_two_time(&c).unwrap();
        assert!((r.gap - 0.25).abs() < 1e-12);
        assert!(r.verdicts.iter().all(|v| v.pass), "{:?}", r.verdicts);
    }

    #[test]
    fn wrong_kind_is_a_config_error() {
        assert!(matches!(run_bell(&ScenarioConfig::new(Kind::Semi)), Err(Error::Config(_))));
    }
}
