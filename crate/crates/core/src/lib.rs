//! Pilot-wave (Bohmian) dynamics for interferometric Bell tests.
//!
//! * [`mode`]: exact four-mode state algebra, coincidence tables, CHSH and
//!   coherent-state beam splitters.
//! * [`joint`]: two-time mode statistics, their marginals and a sampler.
//! * [`wave`]: wave packets on 1D/2D grids, split-step propagation and the
//!   impulsive pointer kick.
//! * [`traj`]: guidance velocities, ensembles and trajectory integration.
//! * [`experiments`]: runnable scenarios with verdicts.
//! * [`report`]: configuration, JSON/CSV/SVG output and the invariant suite.

pub mod error;
pub mod experiments;
pub mod joint;
pub mod mode;
pub mod report;
pub mod rng;
pub mod stats;
pub mod traj;
pub mod wave;

pub use error::{Error, Result};
