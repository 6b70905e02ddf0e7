//! Mode-level two-time statistics of the Bohmian Bell test.
//!
//! Alice's particle is located twice: after her first beam splitter (outcome
//! `a`, setting `x`) and again after undoing it and re-measuring with setting
//! `x'` (outcome `a'`). Bob's particle gives `b` with setting `y`.
//!
//! The joint law is
//!
//! ```text
//! p(a, a', b) = [1 + (-1)^(a+b)  cos(x  + y)] / 4
//!             * [1 + (-1)^(a'+b) cos(x' + y)] / 2
//! ```
//!
//! The second factor carries `x'`, the setting actually used for the second
//! location. With that argument the three marginals below come out as the
//! coincidence law in `(x, y)`, the coincidence law in `(x', y)`, and Alice's
//! `y`-dependent two-time table.

use std::f64::consts::SQRT_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, SampleRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub x: f64,
    pub xp: f64,
    pub y: f64,
}

impl Settings {
    pub fn new(x: f64, xp: f64, y: f64) -> Self {
        Self { x, xp, y }
    }
}

fn sign(n: u8) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Eight-entry table indexed `[a-1][a'-1][b-3]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoTimeJoint {
    pub settings: Settings,
    pub p: [[[f64; 2]; 2]; 2],
}

/// A 2x2 table; which labels index it depends on the marginal.
pub type Table2 = [[f64; 2]; 2];

impl TwoTimeJoint {
    pub fn get(&self, a: u8, ap: u8, b: u8) -> f64 {
        self.p[a as usize - 1][ap as usize - 1][b as usize - 3]
    }

    pub fn total(&self) -> f64 {
        self.entries().map(|(_, v)| v).sum()
    }

    /// `((a, a', b), p)` in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = ((u8, u8, u8), f64)> + '_ {
        OUTCOMES.iter().map(move |&(a, ap, b)| ((a, ap, b), self.get(a, ap, b)))
    }
}

/// All outcome triples in lexicographic order.
pub const OUTCOMES: [(u8, u8, u8); 8] = [
    (1, 1, 3),
    (1, 1, 4),
    (1, 2, 3),
    (1, 2, 4),
    (2, 1, 3),
    (2, 1, 4),
    (2, 2, 3),
    (2, 2, 4),
];

pub fn two_time_joint(x: f64, xp: f64, y: f64) -> TwoTimeJoint {
    let (c1, c2) = ((x + y).cos(), (xp + y).cos());
    let mut p = [[[0.0; 2]; 2]; 2];
    for &(a, ap, b) in &OUTCOMES {
        let first = (1.0 + sign(a + b) * c1) / 4.0;
        let second = (1.0 + sign(ap + b) * c2) / 2.0;
        p[a as usize - 1][ap as usize - 1][b as usize - 3] = first * second;
    }
    TwoTimeJoint { settings: Settings::new(x, xp, y), p }
}

/// Sum over `a'`: table `[a-1][b-3]`.
pub fn marginal_first(j: &TwoTimeJoint) -> Table2 {
    let mut t = [[0.0; 2]; 2];
    for ((a, _, b), v) in j.entries() {
        t[a as usize - 1][b as usize - 3] += v;
    }
    t
}

/// Sum over `a`: table `[a'-1][b-3]`.
pub fn marginal_second(j: &TwoTimeJoint) -> Table2 {
    let mut t = [[0.0; 2]; 2];
    for ((_, ap, b), v) in j.entries() {
        t[ap as usize - 1][b as usize - 3] += v;
    }
    t
}

/// Sum over `b`: Alice's two-time table `[a-1][a'-1]`. This one depends on `y`.
pub fn alice_two_time(j: &TwoTimeJoint) -> Table2 {
    let mut t = [[0.0; 2]; 2];
    for ((a, ap, _), v) in j.entries() {
        t[a as usize - 1][ap as usize - 1] += v;
    }
    t
}

/// Largest variation of any entry of [`alice_two_time`] as Bob's setting runs
/// over `y_grid`, with Alice's settings held fixed.
pub fn signalling_gap(x: f64, xp: f64, y_grid: &[f64]) -> Result<f64> {
    if y_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let tables: Vec<Table2> = y_grid
        .iter()
        .map(|&y| alice_two_time(&two_time_joint(x, xp, y)))
        .collect();
    let mut gap: f64 = 0.0;
    for i in 0..2 {
        for k in 0..2 {
            let (lo, hi) = tables
                .iter()
                .map(|t| t[i][k])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            gap = gap.max(hi - lo);
        }
    }
    Ok(gap)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeTriple {
    pub a: u8,
    pub ap: u8,
    pub b: u8,
    pub index: u64,
    pub seed: u64,
}

/// Draws `(a, b)` from the first-time coincidence law, then `a'` given `b`.
/// Returns `(a, a', b)`.
pub fn draw_outcome<R: Rng + ?Sized>(s: &Settings, rng: &mut R) -> (u8, u8, u8) {
    let c1 = (s.x + s.y).cos();
    // P(a+b even) = (1 + c1)/2, then a is a fair coin.
    let u: f64 = rng.random();
    let even = u < (1.0 + c1) / 2.0;
    let a: u8 = if rng.random::<bool>() { 1 } else { 2 };
    let b: u8 = match (a, even) {
        (1, true) | (2, false) => 3,
        _ => 4,
    };
    let c2 = (s.xp + s.y).cos();
    let u2: f64 = rng.random();
    // P(a' + b even | b) = (1 + c2)/2
    let ap: u8 = if u2 < (1.0 + c2) / 2.0 {
        if b == 3 {
            1
        } else {
            2
        }
    } else if b == 3 {
        2
    } else {
        1
    };
    (a, ap, b)
}

/// One outcome from the sub-stream `index` of `seed`.
pub fn sample_outcome(s: &Settings, seed: u64, index: u64) -> OutcomeTriple {
    let mut r = rng::substream(seed, index);
    let (a, ap, b) = draw_outcome(s, &mut r);
    OutcomeTriple { a, ap, b, index, seed }
}

pub fn sample_outcomes(s: &Settings, n: usize, seed: u64) -> Vec<OutcomeTriple> {
    rng::map_indexed(seed, n, |i, r: &mut SampleRng| {
        let (a, ap, b) = draw_outcome(s, r);
        OutcomeTriple { a, ap, b, index: i as u64, seed }
    })
}

/// Relative frequencies of the eight outcomes, indexed like [`TwoTimeJoint::p`].
pub fn empirical_joint(s: &Settings, samples: &[OutcomeTriple]) -> TwoTimeJoint {
    let mut counts = [[[0usize; 2]; 2]; 2];
    for o in samples {
        counts[o.a as usize - 1][o.ap as usize - 1][o.b as usize - 3] += 1;
    }
    let n = samples.len().max(1) as f64;
    let p = counts.map(|m| m.map(|r| r.map(|c| c as f64 / n)));
    TwoTimeJoint { settings: *s, p }
}

pub fn l1_distance(p: &TwoTimeJoint, q: &TwoTimeJoint) -> f64 {
    p.entries().zip(q.entries()).map(|((_, u), (_, v))| (u - v).abs()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshEstimate {
    pub s: f64,
    pub std_err: f64,
    /// Empirical correlators for (x,y), (x,y'), (x',y), (x',y').
    pub correlators: [f64; 4],
    pub n_per_pair: usize,
}

impl ChshEstimate {
    /// How many standard errors `s` sits above the local bound 2.
    pub fn sigmas_above_classical(&self) -> f64 {
        (self.s - 2.0) / self.std_err
    }
}

pub const TSIRELSON: f64 = 2.0 * SQRT_2;

/// Monte Carlo CHSH from first-time outcomes only. Each of the four setting
/// pairs uses its own seed offset so the pairs are statistically independent.
pub fn chsh_from_samples(x: f64, xp: f64, y: f64, yp: f64, n: usize, seed: u64) -> ChshEstimate {
    let n = n.max(1);
    let pairs = [(x, y), (x, yp), (xp, y), (xp, yp)];
    let mut e = [0.0; 4];
    let mut var = 0.0;
    for (k, &(u, v)) in pairs.iter().enumerate() {
        let st = Settings::new(u, 0.0, v);
        let sub_seed = seed.wrapping_add((k as u64) << 40);
        let outs = sample_outcomes(&st, n, sub_seed);
        let sum: f64 = outs.iter().map(|o| sign(o.a + o.b)).sum();
        e[k] = sum / n as f64;
        let sample_var = 1.0 - e[k] * e[k];
        var += sample_var / n as f64;
    }
    ChshEstimate {
        s: e[0] + e[1] + e[2] - e[3],
        std_err: var.sqrt(),
        correlators: e,
        n_per_pair: n,
    }
}
