//! Scenario configuration. Every field is optional in JSON; missing values
//! are filled per scenario kind by [`ScenarioConfig::resolved`].

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wave::{PacketSpec, SignRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Bell,
    TwoTime,
    Semi,
    PointerSweep,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Bell => "bell",
            Kind::TwoTime => "two-time",
            Kind::Semi => "semi",
            Kind::PointerSweep => "pointer-sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Phases {
    pub x: Option<f64>,
    pub xp: Option<f64>,
    pub y: Option<f64>,
    pub yp: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Particle-axis point count (power of two).
    pub points: Option<usize>,
    /// Particle-axis extent.
    pub extent: Option<f64>,
    /// Trajectory step inside the crossing window.
    pub dt: Option<f64>,
    pub pointer_points: Option<usize>,
    pub pointer_extent: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KickConfig {
    #[serde(default = "default_k")]
    pub k: f64,
    /// `[lo, hi]` on the particle axis; defaults to the half-line on mode 1's
    /// side of the crossing point.
    #[serde(default)]
    pub region: Option<[f64; 2]>,
    #[serde(default = "default_sign_rule")]
    pub sign_rule: SignRule,
    #[serde(default)]
    pub t_apply: f64,
}

fn default_k() -> f64 {
    4.0
}

fn default_sign_rule() -> SignRule {
    SignRule::PlusMinusSplit
}

impl Default for KickConfig {
    fn default() -> Self {
        Self { k: default_k(), region: None, sign_rule: default_sign_rule(), t_apply: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointerSpec {
    #[serde(default = "default_mass")]
    pub mass: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
}

fn default_mass() -> f64 {
    8.0
}

fn default_sigma() -> f64 {
    1.0
}

impl Default for PointerSpec {
    fn default() -> Self {
        Self { mass: default_mass(), sigma: default_sigma() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub n: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParam {
    /// Pointer separation time over crossing time; sets the pointer mass.
    TauRatio,
    Mass,
    K,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_param")]
    pub param: SweepParam,
    #[serde(default = "default_values")]
    pub values: Vec<f64>,
}

fn default_param() -> SweepParam {
    SweepParam::TauRatio
}

fn default_values() -> Vec<f64> {
    vec![0.1, 0.3, 1.0, 3.0, 10.0, 100.0]
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { param: default_param(), values: default_values() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: Kind,
    #[serde(default)]
    pub phases: Phases,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub packets: Option<Vec<PacketSpec>>,
    #[serde(default)]
    pub kick: Option<KickConfig>,
    #[serde(default)]
    pub pointer: Option<PointerSpec>,
    #[serde(default)]
    pub ensemble: EnsembleSpec,
    #[serde(default)]
    pub t_final: Option<f64>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    /// Bob settings scanned by the two-time signalling check.
    #[serde(default)]
    pub y_grid: Option<Vec<f64>>,
}

pub const DEFAULT_SEED: u64 = 1;

/// Default mode-1 / mode-2 packets: they meet at the origin at t = 2.
pub fn default_packets() -> Vec<PacketSpec> {
    vec![PacketSpec::new(-8.0, 4.0, 1.0), PacketSpec::new(8.0, -4.0, 1.0)]
}

impl ScenarioConfig {
    pub fn new(kind: Kind) -> Self {
        Self {
            kind,
            phases: Phases::default(),
            grid: GridSpec::default(),
            packets: None,
            kick: None,
            pointer: None,
            ensemble: EnsembleSpec::default(),
            t_final: None,
            sweep: None,
            y_grid: None,
        }
    }

    /// Copy with every kind-relevant default written out.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        let (x, xp, y, yp) = match c.kind {
            Kind::Bell => (0.0, FRAC_PI_2, -FRAC_PI_4, FRAC_PI_4),
            _ => (0.0, 0.0, 0.0, FRAC_PI_2),
        };
        c.phases = Phases {
            x: c.phases.x.or(Some(x)),
            xp: c.phases.xp.or(Some(xp)),
            y: c.phases.y.or(Some(y)),
            yp: c.phases.yp.or(Some(yp)),
        };
        c.ensemble.seed = c.ensemble.seed.or(Some(DEFAULT_SEED));
        c.ensemble.n = c.ensemble.n.or(Some(match c.kind {
            Kind::Bell | Kind::TwoTime => 100_000,
            Kind::Semi | Kind::PointerSweep => 5000,
        }));
        match c.kind {
            Kind::TwoTime => {
                c.y_grid = c.y_grid.or(Some(vec![0.0, FRAC_PI_2]));
            }
            Kind::Semi | Kind::PointerSweep => {
                c.packets = c.packets.or(Some(default_packets()));
                c.grid.dt = c.grid.dt.or(Some(0.005));
                let wants_pointer = c.kind == Kind::PointerSweep || c.kick.is_some() || c.pointer.is_some();
                if wants_pointer {
                    c.kick = c.kick.or(Some(KickConfig::default()));
                    c.pointer = c.pointer.or(Some(PointerSpec::default()));
                }
                if c.kind == Kind::PointerSweep {
                    c.sweep = c.sweep.or(Some(SweepSpec::default()));
                }
            }
            Kind::Bell => {}
        }
        c
    }

    pub fn seed(&self) -> u64 {
        self.ensemble.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn phases4(&self) -> (f64, f64, f64, f64) {
        let p = self.resolved().phases;
        (p.x.unwrap_or(0.0), p.xp.unwrap_or(0.0), p.y.unwrap_or(0.0), p.yp.unwrap_or(0.0))
    }

    /// Range and consistency checks that do not need a grid.
    pub fn validate(&self) -> Result<()> {
        let r = self.resolved();
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be finite")))
            }
        };
        let (x, xp, y, yp) = r.phases4();
        for (n, v) in [("phases.x", x), ("phases.xp", xp), ("phases.y", y), ("phases.yp", yp)] {
            finite(n, v)?;
        }
        if let Some(ys) = &r.y_grid {
            if ys.is_empty() {
                return Err(Error::EmptyGrid);
            }
            for v in ys {
                finite("y_grid", *v)?;
            }
        }
        if let Some(p) = &r.packets {
            if matches!(r.kind, Kind::Semi | Kind::PointerSweep) && p.len() != 2 {
                return Err(Error::Config(format!("semi-interferometer needs 2 packets, got {}", p.len())));
            }
            for s in p {
                finite("packet.center", s.center)?;
                finite("packet.momentum", s.momentum)?;
                if !(s.sigma > 0.0 && s.sigma.is_finite()) {
                    return Err(Error::Physics(format!("packet width {} must be positive", s.sigma)));
                }
            }
        }
        if let Some(k) = &r.kick {
            if !(k.k >= 0.0 && k.k.is_finite()) {
                return Err(Error::NegativeKick(k.k));
            }
            finite("kick.t_apply", k.t_apply)?;
            if k.t_apply < 0.0 {
                return Err(Error::Physics(format!("kick time {} precedes the start", k.t_apply)));
            }
            if let Some([lo, hi]) = k.region {
                if !(lo < hi) {
                    return Err(Error::RegionMisaligned { lo, hi });
                }
            }
        }
        if let Some(p) = &r.pointer {
            if !(p.mass > 0.0 && p.mass.is_finite()) {
                return Err(Error::Physics(format!("pointer mass {} must be positive", p.mass)));
            }
            if !(p.sigma > 0.0 && p.sigma.is_finite()) {
                return Err(Error::Physics(format!("pointer width {} must be positive", p.sigma)));
            }
        }
        if let Some(dt) = r.grid.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::Physics(format!("time step {dt} must be positive")));
            }
        }
        if let Some(t) = r.t_final {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Physics(format!("t_final {t} must be positive")));
            }
        }
        if let Some(s) = &r.sweep {
            if s.values.is_empty() {
                return Err(Error::EmptyGrid);
            }
            if s.values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::Physics("sweep values must be finite and non-negative".into()));
            }
            if s.param != SweepParam::K && s.values.contains(&0.0) {
                return Err(Error::Physics("mass and tau-ratio sweep values must be positive".into()));
            }
        }
        if matches!(r.kind, Kind::Semi | Kind::PointerSweep) && r.ensemble.n == Some(0) {
            return Err(Error::EmptyEnsemble);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_bell_config_fills_defaults() {
        let c: ScenarioConfig = serde_json::from_str(r#"{"kind":"bell"}"#).unwrap();
        let r = c.resolved();
        assert_eq!(r.phases4(), (0.0, FRAC_PI_2, -FRAC_PI_4, FRAC_PI_4));
        assert_eq!(r.ensemble.n, Some(100_000));
        assert_eq!(r.seed(), DEFAULT_SEED);
        assert!(r.validate().is_ok());
    }

    #[test]
    fn unknown_and_duplicate_keys_are_rejected() {
        assert!(serde_json::from_str::<ScenarioConfig>(r#"{"kind":"bell","bogus":1}"#).is_err());
        assert!(serde_json::from_str::<ScenarioConfig>(r#"{"kind":"bell","kind":"semi"}"#).is_err());
        assert!(serde_json::from_str::<ScenarioConfig>(r#"{"kind":"semi","pointer":{"mass":1,"charge":2}}"#).is_err());
    }

    #[test]
    fn semi_pointer_defaults_follow_the_kick() {
        let bare = ScenarioConfig::new(Kind::Semi).resolved();
        assert!(bare.pointer.is_none() && bare.kick.is_none());
        let c: ScenarioConfig = serde_json::from_str(r#"{"kind":"semi","kick":{"k":2}}"#).unwrap();
        let r = c.resolved();
        assert_eq!(r.pointer, Some(PointerSpec::default()));
        assert_eq!(r.kick.unwrap().sign_rule, SignRule::PlusMinusSplit);
        let s = ScenarioConfig::new(Kind::PointerSweep).resolved();
        assert_eq!(s.sweep.unwrap().values.len(), 6);
    }

    #[test]
    fn validation_errors() {
        let mut c = ScenarioConfig::new(Kind::PointerSweep);
        c.sweep = Some(SweepSpec { param: SweepParam::TauRatio, values: vec![] });
        assert!(matches!(c.validate(), Err(Error::EmptyGrid)));
        let mut c = ScenarioConfig::new(Kind::Semi);
        c.pointer = Some(PointerSpec { mass: -1.0, sigma: 1.0 });
        assert!(matches!(c.validate(), Err(Error::Physics(_))));
    }
}
