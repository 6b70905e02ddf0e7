//! Finite-dimensional calculus for the two-particle, four-mode interferometer.
//!
//! Alice owns modes 1 and 2, Bob owns modes 3 and 4. Every state in the
//! pipeline has exactly one particle on each side, so a state is four complex
//! amplitudes over the joint basis `(a, b)` in the fixed order
//! `(1,3), (1,4), (2,3), (2,4)`.
//!
//! Beam splitters transmit with amplitude `1/sqrt 2` and reflect with
//! amplitude `i/sqrt 2`; the n-th input mode exits towards detector n.

pub mod coherent;

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use coherent::{classical_bs_transform, ebs_transform, CoherentBranch, CoherentTwoMode};

/// Tolerance on the norm of a [`ModeState`].
pub const NORM_TOL: f64 = 1e-12;

/// Basis labels in storage order.
pub const BASIS: [(u8, u8); 4] = [(1, 3), (1, 4), (2, 3), (2, 4)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Alice,
    Bob,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeState {
    amps: [C64; 4],
}

fn index(a: u8, b: u8) -> usize {
    debug_assert!(matches!(a, 1 | 2) && matches!(b, 3 | 4));
    (a as usize - 1) * 2 + (b as usize - 3)
}

impl ModeState {
    /// Builds a state from amplitudes in basis order, rejecting anything that is
    /// not unit-norm. A norm deficit would mean probability sitting in doubly
    /// occupied configurations, which this representation cannot hold.
    pub fn new(amps: [C64; 4]) -> Result<Self> {
        let s = Self { amps };
        let n = s.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::OutsideSubspace(format!(
                "norm^2 = {n:.15} (expected 1)"
            )));
        }
        Ok(s)
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn from_unnormalized(amps: [C64; 4]) -> Result<Self> {
        let n = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::OutsideSubspace("zero or non-finite amplitudes".into()));
        }
        Ok(Self { amps: amps.map(|a| a / n) })
    }

    pub fn amps(&self) -> &[C64; 4] {
        &self.amps
    }

    pub fn amp(&self, a: u8, b: u8) -> C64 {
        self.amps[index(a, b)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn renormalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self { amps: self.amps.map(|a| a / n) }
    }

    /// Largest componentwise distance to `other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// The source state: one particle in modes 1 and 4 superposed with one in 2 and 3.
pub fn make_bell_state() -> ModeState {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    ModeState { amps: [C64::new(0.0, 0.0), h, h, C64::new(0.0, 0.0)] }
}

/// Multiplies every amplitude that has a particle in `mode` by `e^{i phi}`.
pub fn apply_phase(s: &ModeState, mode: u8, phi: f64) -> Result<ModeState> {
    let hit: [bool; 4] = match mode {
        1 => [true, true, false, false],
        2 => [false, false, true, true],
        3 => [true, false, true, false],
        4 => [false, true, false, true],
        m => return Err(Error::InvalidMode(m)),
    };
    let rot = C64::from_polar(1.0, phi);
    let mut amps = s.amps;
    for (amp, &h) in amps.iter_mut().zip(&hit) {
        if h {
            *amp *= rot;
        }
    }
    Ok(ModeState { amps })
}

fn mix(s: &ModeState, side: Side, m: [[C64; 2]; 2]) -> ModeState {
    let mut out = [C64::new(0.0, 0.0); 4];
    match side {
        Side::Alice => {
            for b in [3u8, 4] {
                let (u, l) = (s.amp(1, b), s.amp(2, b));
                out[index(1, b)] = m[0][0] * u + m[0][1] * l;
                out[index(2, b)] = m[1][0] * u + m[1][1] * l;
            }
        }
        Side::Bob => {
            for a in [1u8, 2] {
                let (u, l) = (s.amp(a, 3), s.amp(a, 4));
                out[index(a, 3)] = m[0][0] * u + m[0][1] * l;
                out[index(a, 4)] = m[1][0] * u + m[1][1] * l;
            }
        }
    }
    ModeState { amps: out }
}

fn bs_matrix() -> [[C64; 2]; 2] {
    let t = C64::new(FRAC_1_SQRT_2, 0.0);
    let r = C64::new(0.0, FRAC_1_SQRT_2);
    [[t, r], [r, t]]
}

/// 50/50 beam splitter on one side: `(1/sqrt 2) [[1, i], [i, 1]]`.
pub fn apply_beamsplitter(s: &ModeState, side: Side) -> ModeState {
    mix(s, side, bs_matrix())
}

/// Inverse (adjoint) of [`apply_beamsplitter`].
pub fn apply_beamsplitter_adjoint(s: &ModeState, side: Side) -> ModeState {
    let m = bs_matrix();
    let adj = [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]];
    mix(s, side, adj)
}

/// Coincidence probabilities `P_ab` for `(a, b)` in basis order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceTable {
    pub p: [f64; 4],
}

impl CoincidenceTable {
    pub fn get(&self, a: u8, b: u8) -> f64 {
        self.p[index(a, b)]
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    /// `P13 + P24 - P14 - P23`.
    pub fn correlator(&self) -> f64 {
        self.get(1, 3) + self.get(2, 4) - self.get(1, 4) - self.get(2, 3)
    }
}

pub fn detection_probs(s: &ModeState) -> CoincidenceTable {
    CoincidenceTable { p: s.amps.map(|a| a.norm_sqr()) }
}

/// The state reaching the detectors when Alice uses phase `x` and Bob phase `y`.
pub fn bell_pipeline(x: f64, y: f64) -> ModeState {
    let s = make_bell_state();
    let s = apply_phase(&s, 1, x).expect("mode 1 is valid");
    let s = apply_phase(&s, 4, y).expect("mode 4 is valid");
    let s = apply_beamsplitter(&s, Side::Alice);
    apply_beamsplitter(&s, Side::Bob)
}

/// Correlator `E(x, y)` evaluated through the full state pipeline.
pub fn correlator(x: f64, y: f64) -> f64 {
    detection_probs(&bell_pipeline(x, y)).correlator()
}

/// CHSH combination `E(x,y) + E(x,y') + E(x',y) - E(x',y')`.
pub fn chsh(x: f64, xp: f64, y: f64, yp: f64) -> f64 {
    correlator(x, y) + correlator(x, yp) + correlator(xp, y) - correlator(xp, yp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn bell_state_amplitudes() {
        let s = make_bell_state();
        assert!((s.amp(1, 4).re - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((s.amp(2, 3).re - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(s.amp(1, 3), c(0.0, 0.0));
        assert_eq!(s.amp(2, 4), c(0.0, 0.0));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(s.max_diff(&s.renormalized()) < 1e-15);
    }

    #[test]
    fn phase_identity_and_inverse() {
        let s = make_bell_state();
        assert!(apply_phase(&s, 1, 0.0).unwrap().max_diff(&s) < 1e-15);
        let t = apply_phase(&apply_phase(&s, 1, 0.83).unwrap(), 1, -0.83).unwrap();
        assert!(t.max_diff(&s) < 1e-12);
    }

    #[test]
    fn phases_on_modes_one_and_four() {
        let (x, y) = (0.4, -1.3);
        let s = apply_phase(&apply_phase(&make_bell_state(), 1, x).unwrap(), 4, y).unwrap();
        let want = C64::from_polar(FRAC_1_SQRT_2, x + y);
        assert!((s.amp(1, 4) - want).norm() < 1e-12);
        assert!((s.amp(2, 3) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn invalid_mode_is_rejected() {
        assert!(matches!(apply_phase(&make_bell_state(), 5, 0.1), Err(Error::InvalidMode(5))));
        assert!(matches!(apply_phase(&make_bell_state(), 0, 0.1), Err(Error::InvalidMode(0))));
    }

    #[test]
    fn unnormalized_amplitudes_are_rejected() {
        assert!(ModeState::new([c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn post_beamsplitter_state_termwise() {
        // Expected amplitudes written out term by term from the two sums
        // e^{i(x+y)}(|14> + i|24> + i|13> - |23>) + (|23> + i|24> + i|13> - |14>), all / 2^{3/2}.
        let norm = 2f64.powf(1.5);
        for &(x, y) in &[(0.0, 0.0), (0.3, 1.1), (-2.0, 0.7), (PI, FRAC_PI_4)] {
            let e = C64::from_polar(1.0, x + y);
            let i = c(0.0, 1.0);
            let terms: [(u8, u8, C64); 8] = [
                (1, 4, e),
                (2, 4, e * i),
                (1, 3, e * i),
                (2, 3, -e),
                (2, 3, c(1.0, 0.0)),
                (2, 4, i),
                (1, 3, i),
                (1, 4, c(-1.0, 0.0)),
            ];
            let mut want = [c(0.0, 0.0); 4];
            for (a, b, t) in terms {
                want[index(a, b)] += t / norm;
            }
            let got = bell_pipeline(x, y);
            for k in 0..4 {
                assert!((got.amps()[k] - want[k]).norm() < 1e-12, "x={x} y={y} k={k}");
            }
        }
    }

    #[test]
    fn detection_extremes() {
        let t = detection_probs(&bell_pipeline(0.7, -0.7));
        assert!(t.get(1, 4).abs() < 1e-12 && t.get(2, 3).abs() < 1e-12);
        assert!((t.get(1, 3) - 0.5).abs() < 1e-12 && (t.get(2, 4) - 0.5).abs() < 1e-12);
        let t = detection_probs(&bell_pipeline(PI, 0.0));
        assert!((t.get(1, 4) - 0.5).abs() < 1e-12 && (t.get(2, 3) - 0.5).abs() < 1e-12);
        assert!(t.get(1, 3).abs() < 1e-12 && t.get(2, 4).abs() < 1e-12);
    }

    #[test]
    fn correlator_values() {
        assert!((correlator(0.0, 0.0) - 1.0).abs() < 1e-12);
        assert!(correlator(0.0, FRAC_PI_2).abs() < 1e-12);
        assert!((correlator(FRAC_PI_4, FRAC_PI_4)).abs() < 1e-12);
        assert!((correlator(FRAC_PI_4, 0.0) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn chsh_values() {
        let s = chsh(0.0, FRAC_PI_2, -FRAC_PI_4, FRAC_PI_4);
        assert!((s - 2.0 * SQRT_2).abs() < 1e-9);
        assert!((chsh(0.0, 0.0, 0.0, 0.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn chsh_never_exceeds_tsirelson() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut best: f64 = 0.0;
        for _ in 0..10_000 {
            let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-PI..PI));
            best = best.max(chsh(v[0], v[1], v[2], v[3]).abs());
        }
        assert!(best <= 2.0 * SQRT_2 + 1e-9);
        assert!(best > 2.7, "random scan should come close to the bound, got {best}");
    }

    fn arb_state() -> impl Strategy<Value = ModeState> {
        proptest::array::uniform8(-1.0f64..1.0)
            .prop_filter("non-zero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
            .prop_map(|v| {
                ModeState::from_unnormalized(std::array::from_fn(|k| c(v[2 * k], v[2 * k + 1])))
                    .unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn unitary_operations_preserve_norm(s in arb_state(), phi in -10.0f64..10.0, mode in 1u8..=4) {
            let t = apply_phase(&s, mode, phi).unwrap();
            prop_assert!((t.norm_sqr() - 1.0).abs() < 1e-12);
            for side in [Side::Alice, Side::Bob] {
                let u = apply_beamsplitter(&t, side);
                prop_assert!((u.norm_sqr() - 1.0).abs() < 1e-12);
                let back = apply_beamsplitter_adjoint(&u, side);
                prop_assert!(back.max_diff(&t) < 1e-12);
            }
        }

        #[test]
        fn coincidences_form_a_distribution(s in arb_state()) {
            let t = detection_probs(&s);
            prop_assert!((t.total() - 1.0).abs() < 1e-12);
            prop_assert!(t.p.iter().all(|&p| (0.0..=1.0 + 1e-12).contains(&p)));
        }

        #[test]
        fn correlator_depends_only_on_phase_sum(x in -7.0f64..7.0, y in -7.0f64..7.0, d in -3.0f64..3.0) {
            prop_assert!((correlator(x + d, y - d) - correlator(x, y)).abs() < 1e-12);
            prop_assert!((correlator(x, y) - (x + y).cos()).abs() < 1e-12);
        }
    }
}
