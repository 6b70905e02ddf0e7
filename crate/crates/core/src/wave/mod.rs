//! Wave packets on uniform periodic grids.
//!
//! One- and two-dimensional fields (particle axis `x`, optional pointer axis
//! `y`) are evolved under the free Hamiltonian by the split-step spectral
//! method. A Crank-Nicolson stepper is provided as an independent check.

pub mod field;
pub mod grid;
pub mod kick;
pub mod oracle;
pub mod separable;
pub mod snapshot;
pub mod spectral;

pub use field::{evolve, init_gaussian, superpose, PacketSpec, Superposition, WaveField};
pub use grid::{Axis, Grid};
pub use kick::{apply_kick, branch_distinguishability, pointer_separation_time, KickSpec, SeparationTime, SignRule};
pub use separable::SeparableField;
