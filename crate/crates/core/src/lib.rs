//! Dynamical-decoupling-protected nonadiabatic geometric gates for
//! silicon-vacancy centers coupled through a phononic waveguide.
//!
//! The crate is layered bottom-up:
//!
//! - [`qops`]: dense operators, states, tensor products, partial traces and
//!   matrix exponentials.
//! - [`siv`]: Hamiltonians of driven SiV centers at three levels of
//!   reduction, plus the effective couplings they imply.
//! - [`geometric`]: Bloch-sphere path programs, reverse-engineered control
//!   fields, geometric phases and target unitaries.
//! - [`dd`]: dynamical-decoupling sequences and their injection into gate
//!   evolutions.
//! - [`evolve`]: Liouville propagation of the system plus environment qubit,
//!   fidelity extraction and parameter sweeps.
//!
//! Units: time in microseconds, angular frequencies in rad/us (so that
//! `2π × 1 MHz = 2π rad/us`).

pub mod dd;
pub mod error;
pub mod evolve;
pub mod geometric;
pub mod qops;
pub mod siv;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;

/// Converts a frequency in MHz (ω/2π) to an angular frequency in rad/us.
pub fn mhz(f: f64) -> f64 {
    2.0 * std::f64::consts::PI * f
}

/// Converts a frequency in kHz (ω/2π) to an angular frequency in rad/us.
pub fn khz(f: f64) -> f64 {
    mhz(f * 1e-3)
}

/// Converts an angular frequency in rad/us back to MHz (ω/2π).
pub fn to_mhz(omega: f64) -> f64 {
    omega / (2.0 * std::f64::consts::PI)
}
