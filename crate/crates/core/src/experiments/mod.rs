//! Runnable scenarios: the Bell test, two-time statistics and the
//! semi-interferometer with and without a pointer.

pub mod bell;
pub mod config;
pub mod semi;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub use bell::{run_bell, run_two_time, BellReport, PairTable, TwoTimeReport};
pub use config::{
    default_packets, EnsembleSpec, GridSpec, Kind, KickConfig, Phases, PointerSpec, ScenarioConfig, SweepParam,
    SweepSpec,
};
pub use semi::{run_pointer_sweep, run_semi, Regime, RegimeReport, SemiRun, SemiSetup, SweepReport};

/// One named pass/fail check with the number it was decided on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub limit: f64,
    pub detail: String,
}

impl Verdict {
    /// Passes when `value <= limit`.
    pub fn at_most(name: &str, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass: value <= limit, value, limit, detail: detail.into() }
    }

    /// Passes when `value >= limit`.
    pub fn at_least(name: &str, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass: value >= limit, value, limit, detail: detail.into() }
    }

    pub fn flag(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, value: pass as u8 as f64, limit: 1.0, detail: detail.into() }
    }
}

pub fn all_pass(v: &[Verdict]) -> bool {
    v.iter().all(|v| v.pass)
}

/// Output of any scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Bell(BellReport),
    TwoTime(TwoTimeReport),
    Semi(Box<SemiRun>),
    PointerSweep(SweepReport),
}

impl Outcome {
    pub fn verdicts(&self) -> Vec<Verdict> {
        match self {
            Outcome::Bell(r) => r.verdicts.clone(),
            Outcome::TwoTime(r) => r.verdicts.clone(),
            Outcome::Semi(r) => r.report.verdicts.clone(),
            Outcome::PointerSweep(r) => {
                let mut v = r.verdicts.clone();
                for (i, p) in r.points.iter().enumerate() {
                    v.extend(p.report.verdicts.iter().map(|x| Verdict { name: format!("point{i}.{}", x.name), ..x.clone() }));
                }
                v
            }
        }
    }
}

/// Validates `config` and runs the scenario it names.
pub fn run(config: &ScenarioConfig) -> Result<Outcome> {
    config.validate()?;
    Ok(match config.kind {
        Kind::Bell => Outcome::Bell(run_bell(config)?),
        Kind::TwoTime => Outcome::TwoTime(run_two_time(config)?),
        Kind::Semi => Outcome::Semi(Box::new(run_semi(config)?)),
        Kind::PointerSweep => Outcome::PointerSweep(run_pointer_sweep(config)?),
    })
}
