//! Configuration loading, run manifests, file output and the invariant suite.

pub mod check;
pub mod emit;
pub mod svg;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiments::semi::sweep_point_config;
use crate::experiments::{Kind, ScenarioConfig, SemiSetup, Verdict};

pub use check::{run_checks, CheckOptions};
pub use emit::{emit_results, Format};

pub const TOOL: &str = "pwlab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const RUNTIME: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const PHYSICS: i32 = 3;
    pub const CHECK_FAILED: i32 = 4;
}

/// Exit code for an error: schema problems are usage errors, violated
/// physical preconditions are config errors, everything else is a runtime
/// failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Json(_) => exit::USAGE,
        Error::PacketTooNarrow { .. }
        | Error::MomentumOutOfBand { .. }
        | Error::InvalidGrid(_)
        | Error::RegionMisaligned { .. }
        | Error::NegativeKick(_)
        | Error::NoCrossing { .. }
        | Error::BoundaryProximity(_)
        | Error::Physics(_)
        | Error::EmptyEnsemble
        | Error::EmptyGrid
        | Error::BandwidthViolation { .. }
        | Error::BranchTooSmall(_) => exit::PHYSICS,
        _ => exit::RUNTIME,
    }
}

/// Parses a config from JSON text. Unknown and duplicate keys are rejected.
pub fn parse_config_str(text: &str) -> Result<ScenarioConfig> {
    let c: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    check_physics(&c)?;
    Ok(c.resolved())
}

/// Reads, validates and resolves a config file.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_config_str(&text)
}

/// Runs every precondition the scenario will hit, without running it.
pub fn check_physics(c: &ScenarioConfig) -> Result<()> {
    c.validate()?;
    match c.kind {
        Kind::Semi => {
            SemiSetup::from_config(c)?;
        }
        Kind::PointerSweep => {
            let r = c.resolved();
            let mut base = r.clone();
            base.kind = Kind::Semi;
            base.sweep = None;
            base.t_final = None;
            let t_cross = SemiSetup::from_config(&base)?.t_cross;
            let sweep = r.sweep.clone().unwrap_or_default();
            if sweep.values.is_empty() {
                return Err(Error::EmptyGrid);
            }
            for v in sweep.values {
                SemiSetup::from_config(&sweep_point_config(&r, t_cross, sweep.param, v))?;
            }
        }
        Kind::Bell | Kind::TwoTime => {}
    }
    Ok(())
}

/// Key-sorted compact JSON of any serializable value.
pub fn canonical_json<T: Serialize>(v: &T) -> Result<String> {
    // serde_json's Value map is ordered by key
    Ok(serde_json::to_string(&serde_json::to_value(v)?)?)
}

/// SHA-256 of [`canonical_json`], hex encoded.
pub fn canonical_hash<T: Serialize>(v: &T) -> Result<String> {
    let digest = Sha256::digest(canonical_json(v)?.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Hash of the resolved config, so spelled-out defaults hash like omitted ones.
pub fn config_hash(c: &ScenarioConfig) -> Result<String> {
    canonical_hash(&c.resolved())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictSummary {
    pub name: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub started_at: String,
    pub finished_at: String,
    pub verdicts: Vec<VerdictSummary>,
    pub all_pass: bool,
    pub files: Vec<String>,
}

impl RunManifest {
    /// Timestamps are left empty for the caller to fill in.
    pub fn new(command: &str, config_hash: String, seed: u64, verdicts: &[Verdict], files: Vec<String>) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            config_hash,
            seed,
            started_at: String::new(),
            finished_at: String::new(),
            verdicts: verdicts.iter().map(|v| VerdictSummary { name: v.name.clone(), pass: v.pass }).collect(),
            all_pass: verdicts.iter().all(|v| v.pass),
            files,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_bell_resolves() {
        let c = parse_config_str(r#"{"kind":"bell"}"#).unwrap();
        assert_eq!(c.ensemble.n, Some(100_000));
        assert!(c.phases.yp.is_some());
    }

    #[test]
    fn hash_ignores_key_order_and_defaults() {
        let a = parse_config_str(r#"{"kind":"two-time","phases":{"x":0.1,"y":0.2},"ensemble":{"seed":3}}"#).unwrap();
        let b = parse_config_str(r#"{"ensemble":{"seed":3},"phases":{"y":0.2,"x":0.1},"kind":"two-time"}"#).unwrap();
        assert_eq!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
        let c = parse_config_str(r#"{"kind":"two-time","phases":{"x":0.1,"y":0.2},"ensemble":{"seed":4}}"#).unwrap();
        assert_ne!(config_hash(&a).unwrap(), config_hash(&c).unwrap());
        assert_eq!(config_hash(&a).unwrap().len(), 64);
    }

    #[test]
    fn error_classes() {
        let dup = parse_config_str(r#"{"kind":"bell","kind":"bell"}"#).unwrap_err();
        assert_eq!(exit_code(&dup), exit::USAGE);
        let unknown = parse_config_str(r#"{"kind":"bell","colour":1}"#).unwrap_err();
        assert_eq!(exit_code(&unknown), exit::USAGE);
        let narrow = parse_config_str(
            r#"{"kind":"semi","grid":{"points":2048,"extent":200},
                "packets":[{"center":-8,"momentum":4,"sigma":0.1},{"center":8,"momentum":-4,"sigma":0.1}]}"#,
        )
        .unwrap_err();
        assert!(matches!(narrow, Error::PacketTooNarrow { .. }), "{narrow}");
        assert_eq!(exit_code(&narrow), exit::PHYSICS);
        let missing = parse_config(Path::new("/nonexistent/pwlab.json")).unwrap_err();
        assert_eq!(exit_code(&missing), exit::USAGE);
    }
}
