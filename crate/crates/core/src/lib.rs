//! Numerical laboratory for the damped wave equation
//! `u_tt - Laplace(u) + b(x) u_t = 0` on the unit torus and square, with
//! x-invariant damping in one direction.
//!
//! The crate computes and cross-validates, by independent routes:
//! strip-damping spectral branches from their transcendental quantization
//! conditions, general 1D spectra via monodromy matrices and the argument
//! principle, quasimode-driven resolvent lower bounds, resolvent norm scans
//! along the imaginary axis, energy decay in the time domain, and the
//! first-order-system identities on Fourier truncations.

pub mod cx;
pub mod error;
pub mod fitting;
pub mod geom;
pub mod linalg;
pub mod mode;
pub mod monodromy;
pub mod profile;
pub mod quadrature;
pub mod strip;

pub use cx::C64;
pub use error::{Error, Result};
pub use geom::{Boundary, Domain, Geometry, ModeIndex, Parity};
pub use profile::DampingProfile;

/// Formats a float with 17 significant digits (exact f64 round-trip) for CSV
/// and report output.
pub fn fmt_g17(x: f64) -> String {
    format!("{:.16e}", x)
}
